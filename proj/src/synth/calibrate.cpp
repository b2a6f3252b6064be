#include "aid/synth/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "aid/error.hpp"
#include "aid/synth/bench.hpp"

namespace aid::synth {
namespace {

constexpr double kMinEraseArea = 0.005;

TinyRegressor<float> warm_model(const ProbeOptions& o, const std::vector<Sample>& data) {
    const Rng root(o.seed);
    if (o.warmup_epochs == 0) {
        TinyRegressor<float> model(o.shape);
        Rng init = root.fork("probe-train").fork("init");
        model.initialize(init);
        return model;
    }
    ExperimentConfig cfg;
    cfg.plan.name = "probe-warmup";
    cfg.plan.total_epochs = o.warmup_epochs;
    cfg.plan.lr_segments = {{0, 1e-3}};
    cfg.plan.aid_segments = {{0, false}};
    AidConfig aid;
    aid.method = DropMethod::none;
    GeomConfig geom;
    geom.flip_prob = 0.0;
    geom.scale_min = geom.scale_max = 1.0;
    geom.rotation_max_deg = 0.0;
    geom.output_width = o.shape.input_width;
    geom.output_height = o.shape.input_height;
    geom.mode = CropMode::bottom_up;
    TrainOptions t;
    t.batch_size = o.batch_size;
    t.base_lr = o.base_lr;
    t.sigma = o.sigma;
    t.shape = o.shape;
    return train(cfg, data, {}, aid, geom, root.fork("probe-train"), t).model;
}

double relative_gap(double loss, double reference) {
    return std::abs(loss / reference - 1.0);
}

}  // namespace

LossProbe::LossProbe(const ProbeOptions& opts) : opts_(opts), model_(opts.shape) {
    AID_CHECK(opts.probe_size >= 1, "probe size must be >= 1");
    AID_CHECK(opts.warmup_epochs >= 0, "warmup epochs must be >= 0");
    AID_CHECK(opts.tolerance > 0.0, "calibration tolerance must be > 0");
    AID_CHECK(opts.max_iterations >= 1, "calibration needs at least one iteration");
    AID_CHECK(opts.figure.image_width == opts.shape.input_width &&
                  opts.figure.image_height == opts.shape.input_height,
              "probe figure size must equal the regressor input size");
    Rng data_rng = Rng(opts.seed).fork("probe-data");
    data_ = generate_dataset(data_rng, opts.probe_size, opts.figure);
    model_ = warm_model(opts, data_);
    std::vector<ImageBuffer> images;
    images.reserve(data_.size());
    for (const auto& s : data_) {
        images.push_back(s.image);
        const auto t = training_targets(s.instance, opts.shape, opts.sigma);
        targets_.insert(targets_.end(), t.begin(), t.end());
    }
    fill_ = dataset_mean(images);
}

double LossProbe::loss(const AidConfig& cfg) const {
    AidConfig c = cfg;
    if (c.fill.mode == FillPolicy::Mode::dataset_mean) c.fill.values = fill_;
    validate(c);
    const Rng masks = Rng(opts_.seed).fork("probe-masks");
    const std::size_t n_in = model_.input_size();
    std::vector<float> inputs(n_in * data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        Rng r = masks.fork(static_cast<std::uint64_t>(i));
        const auto& img = data_[i].image;
        const auto mask = sample_aid_mask(r, img.width(), img.height(), c);
        const ImageBuffer masked = mask ? apply_mask(img, *mask, c.fill) : img;
        image_to_input<float>(masked, std::span<float>(inputs).subspan(i * n_in, n_in));
    }
    return model_.loss_and_gradient(inputs, targets_, static_cast<int>(data_.size()), {});
}

KnobRange knob_range(const AidConfig& cfg, int width, int height) {
    const int side = std::min(width, height);
    switch (cfg.method) {
        case DropMethod::none: return {0.0, 0.0};
        case DropMethod::cutout:
            return {std::max(1.0, std::round(0.1 * side)), std::max(1.0, std::floor(0.75 * side))};
        case DropMethod::random_erase: {
            const double half = 0.5 * (cfg.random_erase.area_max - cfg.random_erase.area_min);
            return {kMinEraseArea, 1.0 - half};
        }
        case DropMethod::has: return {0.01, 1.0};
        case DropMethod::gridmask: {
            const int d = resolved_periods(cfg.gridmask, width, height).lo;
            return {0.1, std::max(0.1, 1.0 - 1.0 / d)};
        }
    }
    return {0.0, 0.0};
}

double knob_value(const AidConfig& cfg, int width, int height) {
    switch (cfg.method) {
        case DropMethod::none: return 0.0;
        case DropMethod::cutout: return resolved_hole_w(cfg.cutout, width, height);
        case DropMethod::random_erase: return 0.5 * (cfg.random_erase.area_min + cfg.random_erase.area_max);
        case DropMethod::has: return cfg.has.drop_prob;
        case DropMethod::gridmask: return cfg.gridmask.ratio;
    }
    return 0.0;
}

AidConfig with_knob(const AidConfig& cfg, double value, int width, int height) {
    AidConfig c = cfg;
    switch (c.method) {
        case DropMethod::none: break;
        case DropMethod::cutout: {
            const int side = std::max(1, static_cast<int>(std::lround(value)));
            c.cutout.hole_w = c.cutout.hole_h = side;
            break;
        }
        case DropMethod::random_erase: {
            // The range keeps its width unless that would push area_min to zero.
            const double half = std::min(0.5 * (c.random_erase.area_max - c.random_erase.area_min),
                                         value - kMinEraseArea / 2);
            c.random_erase.area_min = value - half;
            c.random_erase.area_max = value + half;
            break;
        }
        case DropMethod::has: c.has.drop_prob = value; break;
        case DropMethod::gridmask: c.gridmask.ratio = value; break;
    }
    (void)width;
    (void)height;
    return c;
}

std::vector<CalibrationResult> calibrate(const std::vector<AidConfig>& configs, const LossProbe& probe) {
    AID_CHECK(!configs.empty(), "calibrate: at least one config is required");
    const auto& o = probe.options();
    const int w = o.shape.input_width, h = o.shape.input_height;
    const double reference = probe.loss(configs.front());
    AID_CHECK(reference > 0.0, "calibrate: reference probe loss must be positive");

    std::vector<CalibrationResult> out;
    out.push_back({configs.front(), knob_value(configs.front(), w, h), reference, reference, true});
    for (std::size_t i = 1; i < configs.size(); ++i) {
        const AidConfig& cfg = configs[i];
        validate(cfg);
        CalibrationResult best{cfg, knob_value(cfg, w, h), probe.loss(cfg), reference, false};
        auto consider = [&](double knob) {
            const AidConfig c = with_knob(cfg, knob, w, h);
            const double l = probe.loss(c);
            if (relative_gap(l, reference) < relative_gap(best.loss, reference))
                best = {c, knob_value(c, w, h), l, reference, false};
            return l;
        };
        const bool integral = cfg.method == DropMethod::cutout;
        if (relative_gap(best.loss, reference) > o.tolerance && cfg.method != DropMethod::none) {
            double lo = knob_range(cfg, w, h).lo, hi = knob_range(cfg, w, h).hi;
            const double f_lo = consider(lo) - reference;
            const double f_hi = consider(hi) - reference;
            if ((f_lo < 0) != (f_hi < 0)) {
                const bool rising = f_lo < 0;
                for (int it = 0; it < o.max_iterations && relative_gap(best.loss, reference) > o.tolerance; ++it) {
                    if (integral && hi - lo <= 1.0) break;
                    const double mid = integral ? std::floor(0.5 * (lo + hi)) : 0.5 * (lo + hi);
                    const bool below = consider(mid) < reference;
                    (below == rising ? lo : hi) = mid;
                }
            }
        }
        best.reached = relative_gap(best.loss, reference) <= o.tolerance;
        out.push_back(std::move(best));
    }
    return out;
}

}  // namespace aid::synth

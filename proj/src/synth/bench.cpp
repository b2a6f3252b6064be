#include "aid/synth/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "aid/error.hpp"

namespace aid::synth {
namespace {

constexpr double kScheduleBaseLr = 1e-3;

double diagonal(const ImageBuffer& img) {
    return std::hypot(static_cast<double>(img.width()), static_cast<double>(img.height()));
}

}  // namespace

PckResult pck(const std::vector<std::vector<DecodedKeypoint>>& predictions,
              const std::vector<OccludedSample>& test_set, double threshold_frac) {
    AID_CHECK(predictions.size() == test_set.size(), "pck: one prediction list per test sample is required");
    AID_CHECK(threshold_frac >= 0.0, "pck: threshold must be >= 0");
    std::size_t total = 0, hits = 0, occ_total = 0, occ_hits = 0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const auto& s = test_set[i];
        const double thr = threshold_frac * diagonal(s.image);
        AID_CHECK(predictions[i].size() == s.instance.keypoints.size(), "pck: keypoint count mismatch");
        for (std::size_t k = 0; k < s.instance.keypoints.size(); ++k) {
            const auto& g = s.instance.keypoints[k];
            if (!g.labeled()) continue;
            const bool hit = std::hypot(predictions[i][k].x - g.x, predictions[i][k].y - g.y) <= thr;
            ++total;
            hits += hit;
            if (k < s.occluded.size() && s.occluded[k]) {
                ++occ_total;
                occ_hits += hit;
            }
        }
    }
    PckResult r;
    r.overall = total ? static_cast<double>(hits) / total : 0.0;
    if (occ_total) r.occluded = static_cast<double>(occ_hits) / occ_total;
    return r;
}

std::vector<std::vector<DecodedKeypoint>> predict(const TinyRegressor<float>& model,
                                                  const std::vector<OccludedSample>& samples) {
    const auto& shape = model.shape();
    constexpr int kChunk = 64;
    std::vector<std::vector<DecodedKeypoint>> out;
    out.reserve(samples.size());
    std::vector<float> inputs;
    for (std::size_t begin = 0; begin < samples.size(); begin += kChunk) {
        const int n = static_cast<int>(std::min<std::size_t>(kChunk, samples.size() - begin));
        inputs.resize(model.input_size() * n);
        for (int b = 0; b < n; ++b)
            image_to_input<float>(samples[begin + b].image,
                                  std::span<float>(inputs).subspan(b * model.input_size(), model.input_size()));
        const auto maps = model.forward(inputs, n);
        for (int b = 0; b < n; ++b)
            out.push_back(decode_heatmaps(std::span<const float>(maps).subspan(b * model.output_size(), model.output_size()),
                                          shape.num_keypoints, shape.output_height(), shape.output_width(),
                                          RegressorShape::output_stride));
    }
    return out;
}

PckResult pck(const TinyRegressor<float>& model, const std::vector<OccludedSample>& test_set,
              double threshold_frac) {
    return pck(predict(model, test_set), test_set, threshold_frac);
}

std::vector<float> training_targets(const KeypointInstance& instance, const RegressorShape& shape,
                                    double sigma) {
    const auto stack = render_heatmaps(instance, shape.output_height(), shape.output_width(),
                                       RegressorShape::output_stride, sigma);
    const auto v = stack.values();
    return std::vector<float>(v.begin(), v.end());
}

TrainResult train(const ExperimentConfig& cfg, const std::vector<Sample>& data,
                  const std::vector<OccludedSample>& test_set, const AidConfig& aid,
                  const GeomConfig& geom, const Rng& rng, const TrainOptions& opts) {
    AID_CHECK(!data.empty(), "train: empty training set");
    AID_CHECK(opts.batch_size >= 1, "train: batch size must be >= 1");
    AID_CHECK(opts.base_lr >= 0.0, "train: base_lr must be >= 0");
    AID_CHECK(geom.output_width == opts.shape.input_width && geom.output_height == opts.shape.input_height,
              "train: geometry output size must equal the regressor input size");
    validate(geom);
    validate(aid);

    TrainResult result{TinyRegressor<float>(opts.shape), {}};
    auto& model = result.model;
    Rng init = rng.fork("init");
    model.initialize(init);
    const Rng shuffle_root = rng.fork("shuffle");
    const Rng augment_root = rng.fork("augment");
    const auto& layout = stick_figure_layout();
    AID_CHECK(layout.size() == static_cast<std::size_t>(opts.shape.num_keypoints),
              "train: regressor keypoint count does not match the stick figure");

    AidConfig aid_off = aid;
    aid_off.method = DropMethod::none;
    const double lr_scale = opts.base_lr / kScheduleBaseLr;
    const std::size_t n_in = model.input_size(), n_out = model.output_size();
    std::vector<float> velocity(model.parameter_count(), 0.0f), grad(model.parameter_count());
    std::vector<float> inputs, targets;
    std::vector<std::size_t> order(data.size());

    for (int epoch = 0; epoch < cfg.plan.total_epochs; ++epoch) {
        const float lr = static_cast<float>(lr_at(cfg.plan, epoch) * lr_scale);
        const AidConfig& active = aid_active(cfg, epoch) ? aid : aid_off;
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle = shuffle_root.fork(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
        const Rng epoch_aug = augment_root.fork(static_cast<std::uint64_t>(epoch));

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += opts.batch_size) {
            const int n = static_cast<int>(std::min<std::size_t>(opts.batch_size, order.size() - begin));
            inputs.resize(n_in * n);
            targets.resize(n_out * n);
            for (int b = 0; b < n; ++b) {
                const std::size_t idx = order[begin + b];
                Rng sample_rng = epoch_aug.fork(static_cast<std::uint64_t>(idx));
                const auto aug = augment_sample(sample_rng, data[idx].image, data[idx].instance, layout, geom, active);
                image_to_input<float>(aug.image, std::span<float>(inputs).subspan(b * n_in, n_in));
                const auto t = training_targets(aug.instance, opts.shape, opts.sigma);
                std::copy(t.begin(), t.end(), targets.begin() + b * n_out);
            }
            const float loss = model.loss_and_gradient(inputs, targets, n, grad);
            if (!std::isfinite(loss))
                throw DivergenceError(fmt::format("training diverged at epoch {} (non-finite loss)", epoch), epoch);
            loss_sum += static_cast<double>(loss) * n;
            auto params = model.parameters();
            const auto mu = static_cast<float>(opts.momentum);
            for (std::size_t i = 0; i < params.size(); ++i) {
                velocity[i] = mu * velocity[i] + grad[i];
                params[i] -= lr * velocity[i];
            }
        }
        if (!model.all_finite())
            throw DivergenceError(fmt::format("training diverged at epoch {} (non-finite parameters)", epoch), epoch);

        result.curves.train_loss.push_back(loss_sum / static_cast<double>(data.size()));
        if (test_set.empty()) {
            result.curves.pck.push_back(std::numeric_limits<double>::quiet_NaN());
            result.curves.pck_occluded.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            const auto p = pck(model, test_set, opts.pck_threshold);
            result.curves.pck.push_back(p.overall);
            result.curves.pck_occluded.push_back(p.occluded.value_or(std::numeric_limits<double>::quiet_NaN()));
        }
    }
    return result;
}

BenchConfig BenchConfig::defaults() {
    BenchConfig c;
    c.aid.method = DropMethod::has;
    c.aid.apply_prob = 1.0;
    c.aid.has.drop_prob = 0.5;
    c.aid.fill = FillPolicy::dataset_mean({127.0});
    c.geom.flip_prob = 0.5;
    c.geom.scale_min = 1.0;
    c.geom.scale_max = 1.0;
    c.geom.rotation_max_deg = 0.0;
    c.geom.output_width = c.figure.image_width;
    c.geom.output_height = c.figure.image_height;
    c.geom.mode = CropMode::bottom_up;
    c.geom.aid_order = AidOrder::after_geometry;
    c.train.base_lr = 1.0;
    c.train.shape.input_width = c.figure.image_width;
    c.train.shape.input_height = c.figure.image_height;
    return c;
}

std::vector<BenchRun> run_bench(const std::vector<ExperimentId>& ids, const std::vector<std::uint64_t>& seeds,
                                const BenchConfig& cfg) {
    AID_CHECK(!ids.empty(), "bench: at least one experiment is required");
    AID_CHECK(!seeds.empty(), "bench: at least one seed is required");
    AID_CHECK(cfg.train_size >= 1 && cfg.test_size >= 1, "bench: train and test sizes must be >= 1");
    std::vector<BenchRun> runs;
    for (const auto seed : seeds) {
        const Rng root(seed);
        Rng data_rng = root.fork("data");
        const auto data = generate_dataset(data_rng, cfg.train_size, cfg.figure);
        Rng test_rng = root.fork("test");
        const auto clean_test = generate_dataset(test_rng, cfg.test_size, cfg.figure);
        Rng occ_rng = root.fork("occlude");
        const auto test = occlude_test_set(occ_rng, clean_test, cfg.occlusion_rate, cfg.figure);

        AidConfig aid = cfg.aid;
        if (aid.fill.mode == FillPolicy::Mode::dataset_mean) {
            std::vector<ImageBuffer> images;
            images.reserve(data.size());
            for (const auto& s : data) images.push_back(s.image);
            aid.fill.values = dataset_mean(images);
        }
        for (const auto id : ids) {
            const auto exp = make_experiment(id, cfg.scale);
            auto result = train(exp, data, test, aid, cfg.geom, root.fork("train"), cfg.train);
            runs.push_back({id, seed, exp.plan, std::move(result.curves)});
        }
    }
    return runs;
}

namespace {

std::string csv_number(double v) {
    return std::isfinite(v) ? fmt::format("{:.9g}", v) : std::string{};
}

}  // namespace

std::string curves_to_csv(const std::vector<BenchRun>& runs) {
    std::string out = "experiment,seed,epoch,lr,aid,train_loss,pck,pck_occluded\n";
    for (const auto& r : runs) {
        const ExperimentConfig exp{r.id, r.plan};
        for (std::size_t e = 0; e < r.curves.train_loss.size(); ++e) {
            const int epoch = static_cast<int>(e);
            out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(r.id), r.seed, epoch,
                               csv_number(lr_at(r.plan, epoch)), aid_active(exp, epoch) ? 1 : 0,
                               csv_number(r.curves.train_loss[e]), csv_number(r.curves.pck[e]),
                               csv_number(r.curves.pck_occluded[e]));
        }
    }
    return out;
}

std::string curves_to_svg(const std::vector<BenchRun>& runs) {
    struct Series {
        std::vector<double> loss, pck_occ;
        std::vector<int> count_loss, count_occ;
    };
    std::map<ExperimentId, Series> series;
    for (const auto& r : runs) {
        auto& s = series[r.id];
        const std::size_t n = r.curves.train_loss.size();
        if (s.loss.size() < n) {
            s.loss.resize(n, 0.0);
            s.pck_occ.resize(n, 0.0);
            s.count_loss.resize(n, 0);
            s.count_occ.resize(n, 0);
        }
        for (std::size_t e = 0; e < n; ++e) {
            s.loss[e] += r.curves.train_loss[e];
            ++s.count_loss[e];
            if (std::isfinite(r.curves.pck_occluded[e])) {
                s.pck_occ[e] += r.curves.pck_occluded[e];
                ++s.count_occ[e];
            }
        }
    }
    std::size_t max_epochs = 1;
    double max_loss = 0.0;
    for (auto& [id, s] : series) {
        max_epochs = std::max(max_epochs, s.loss.size());
        for (std::size_t e = 0; e < s.loss.size(); ++e) {
            s.loss[e] /= std::max(1, s.count_loss[e]);
            s.pck_occ[e] = s.count_occ[e] ? s.pck_occ[e] / s.count_occ[e] : std::numeric_limits<double>::quiet_NaN();
            max_loss = std::max(max_loss, s.loss[e]);
        }
    }
    if (max_loss <= 0.0) max_loss = 1.0;

    constexpr double kPanelW = 420, kPanelH = 260, kMargin = 50, kGap = 60;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        2 * kPanelW + kGap + 2 * kMargin, kPanelH + 2 * kMargin + 30);

    auto panel = [&](double x0, const char* title, double y_max, auto values_of) {
        const double y0 = kMargin;
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x0 + kPanelW / 2, y0 - 12, title);
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", x0, y0,
                           kPanelW, kPanelH);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">epoch</text>\n", x0 + kPanelW / 2,
                           y0 + kPanelH + 28);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", x0 - 4, y0 + 4, y_max);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">0</text>\n", x0 - 4, y0 + kPanelH + 4);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", x0 + kPanelW, y0 + kPanelH + 14,
                           max_epochs);
        for (const auto& [id, s] : series) {
            const auto& v = values_of(s);
            std::string points;
            for (std::size_t e = 0; e < v.size(); ++e) {
                if (!std::isfinite(v[e])) continue;
                const double px = x0 + kPanelW * (static_cast<double>(e) + 1.0) / static_cast<double>(max_epochs);
                const double py = y0 + kPanelH * (1.0 - std::clamp(v[e] / y_max, 0.0, 1.0));
                points += fmt::format("{:.1f},{:.1f} ", px, py);
            }
            svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                               colors[static_cast<int>(id)], points);
        }
    };
    panel(kMargin, "train loss (mean over seeds)", max_loss * 1.05, [](const Series& s) -> const auto& { return s.loss; });
    panel(kMargin + kPanelW + kGap, "occluded-keypoint PCK (mean over seeds)", 1.0,
          [](const Series& s) -> const auto& { return s.pck_occ; });

    double lx = kMargin;
    for (const auto& [id, s] : series) {
        const double ly = kMargin + kPanelH + 48;
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", lx, ly - 4,
                           lx + 20, ly - 4, colors[static_cast<int>(id)]);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 24, ly, to_string(id));
        lx += 70;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace aid::synth

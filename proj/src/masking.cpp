#include "aid/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aid/error.hpp"

namespace aid {
namespace {

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

double floor_mod(double a, double m) {
    return a - m * std::floor(a / m);
}

}  // namespace

std::string_view to_string(FillPolicy::Mode mode) {
    switch (mode) {
        case FillPolicy::Mode::constant: return "constant";
        case FillPolicy::Mode::dataset_mean: return "dataset-mean";
        case FillPolicy::Mode::per_image_mean: return "per-image-mean";
    }
    return "?";
}

FillPolicy::Mode parse_fill_mode(std::string_view text) {
    if (text == "constant") return FillPolicy::Mode::constant;
    if (text == "dataset-mean" || text == "dataset_mean") return FillPolicy::Mode::dataset_mean;
    if (text == "per-image-mean" || text == "per_image_mean") return FillPolicy::Mode::per_image_mean;
    throw InvalidArgument("unknown fill mode '" + std::string(text) + "'");
}

void validate(const FillPolicy& fill) {
    if (fill.mode == FillPolicy::Mode::per_image_mean) return;
    AID_CHECK(fill.values.size() == 1 || fill.values.size() == 3,
              "fill values must have 1 or 3 entries");
    for (double v : fill.values)
        AID_CHECK(v >= 0.0 && v <= 255.0, "fill values must lie in [0, 255]");
}

std::vector<std::uint8_t> fill_values(const FillPolicy& fill, const ImageBuffer& img) {
    const int c = img.channels();
    std::vector<std::uint8_t> out(c);
    if (fill.mode == FillPolicy::Mode::per_image_mean) {
        const auto mean = channel_mean(img);
        for (int i = 0; i < c; ++i) out[i] = to_u8(mean[i]);
        return out;
    }
    validate(fill);
    AID_CHECK(fill.values.size() == 1 || static_cast<int>(fill.values.size()) == c,
              "fill values do not match the image channel count");
    for (int i = 0; i < c; ++i) out[i] = to_u8(fill.values.size() == 1 ? fill.values[0] : fill.values[i]);
    return out;
}

std::vector<double> dataset_mean(const std::vector<ImageBuffer>& images) {
    AID_CHECK(!images.empty(), "dataset mean needs at least one image");
    const int c = images.front().channels();
    std::vector<double> sum(c, 0.0);
    double count = 0.0;
    for (const auto& img : images) {
        AID_CHECK(img.channels() == c, "dataset images must share a channel count");
        const auto data = img.data();
        for (std::size_t i = 0; i < data.size(); ++i) sum[i % c] += data[i];
        count += static_cast<double>(img.width()) * img.height();
    }
    for (auto& s : sum) s = count > 0 ? s / count : 0.0;
    return sum;
}

void validate(const CutoutParams& p) {
    AID_CHECK(p.num_holes >= 0, "cutout: num_holes must be >= 0");
    AID_CHECK(p.hole_w >= 0 && p.hole_h >= 0, "cutout: hole size must be >= 1 (or 0 for the default)");
}

void validate(const RandomEraseParams& p) {
    AID_CHECK(p.area_min > 0.0 && p.area_min <= p.area_max && p.area_max <= 1.0,
              "random erase: area range must satisfy 0 < area_min <= area_max <= 1");
    AID_CHECK(p.aspect_min > 0.0 && p.aspect_min <= p.aspect_max,
              "random erase: aspect range must satisfy 0 < aspect_min <= aspect_max");
    AID_CHECK(p.max_attempts >= 1, "random erase: max_attempts must be >= 1");
}

void validate(const HasParams& p) {
    AID_CHECK(p.grid_rows >= 1 && p.grid_cols >= 1, "has: grid must be at least 1 x 1");
    AID_CHECK(p.drop_prob >= 0.0 && p.drop_prob <= 1.0, "has: drop_prob must lie in [0, 1]");
}

void validate(const GridMaskParams& p) {
    AID_CHECK(p.ratio >= 0.0 && p.ratio <= 1.0, "gridmask: ratio must lie in [0, 1]");
    AID_CHECK(p.rotate_max_deg >= 0.0, "gridmask: rotate_max_deg must be >= 0");
    const bool automatic = p.period_min == 0 && p.period_max == 0;
    if (automatic) return;
    AID_CHECK(p.period_min >= 2 && p.period_min <= p.period_max,
              "gridmask: period range must satisfy 2 <= period_min <= period_max");
    for (int d = p.period_min; d <= p.period_max; ++d)
        AID_CHECK(std::lround(p.ratio * d) < d, "gridmask: dropped square must be smaller than the period");
}

std::string_view to_string(DropMethod method) {
    switch (method) {
        case DropMethod::none: return "none";
        case DropMethod::cutout: return "cutout";
        case DropMethod::random_erase: return "random-erase";
        case DropMethod::has: return "has";
        case DropMethod::gridmask: return "gridmask";
    }
    return "?";
}

DropMethod parse_drop_method(std::string_view text) {
    if (text == "none") return DropMethod::none;
    if (text == "cutout") return DropMethod::cutout;
    if (text == "random-erase" || text == "random_erase") return DropMethod::random_erase;
    if (text == "has") return DropMethod::has;
    if (text == "gridmask") return DropMethod::gridmask;
    throw InvalidArgument("unknown drop method '" + std::string(text) + "'");
}

void validate(const AidConfig& cfg) {
    AID_CHECK(cfg.apply_prob >= 0.0 && cfg.apply_prob <= 1.0, "apply_prob must lie in [0, 1]");
    validate(cfg.fill);
    validate(cfg.cutout);
    validate(cfg.random_erase);
    validate(cfg.has);
    validate(cfg.gridmask);
}

int resolved_hole_w(const CutoutParams& p, int w, int h) {
    return p.hole_w > 0 ? p.hole_w : std::max(1, static_cast<int>(std::lround(0.25 * std::min(w, h))));
}

int resolved_hole_h(const CutoutParams& p, int w, int h) {
    return p.hole_h > 0 ? p.hole_h : std::max(1, static_cast<int>(std::lround(0.25 * std::min(w, h))));
}

void draw_cutout_hole(BinaryMask& mask, int cx, int cy, int hole_w, int hole_h) {
    const int x0 = cx - hole_w / 2;
    const int y0 = cy - hole_h / 2;
    mask.drop_rect(x0, y0, x0 + hole_w, y0 + hole_h);
}

BinaryMask sample_cutout(Rng& rng, int w, int h, const CutoutParams& p) {
    AID_CHECK(w >= 1 && h >= 1, "cutout: image must be at least 1 x 1");
    validate(p);
    BinaryMask mask(w, h);
    const int hw = resolved_hole_w(p, w, h);
    const int hh = resolved_hole_h(p, w, h);
    for (int i = 0; i < p.num_holes; ++i) {
        const int cx = static_cast<int>(rng.uniform_int(0, w - 1));
        const int cy = static_cast<int>(rng.uniform_int(0, h - 1));
        draw_cutout_hole(mask, cx, cy, hw, hh);
    }
    return mask;
}

RandomEraseDraw sample_random_erase(Rng& rng, int w, int h, const RandomEraseParams& p) {
    AID_CHECK(w >= 1 && h >= 1, "random erase: image must be at least 1 x 1");
    validate(p);
    RandomEraseDraw out{BinaryMask(w, h), false};
    const double total = static_cast<double>(w) * h;
    const double log_lo = std::log(p.aspect_min);
    const double log_hi = std::log(p.aspect_max);
    for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
        const double target = rng.uniform(p.area_min, p.area_max) * total;
        const double aspect = std::exp(rng.uniform(log_lo, log_hi));
        const int rh = static_cast<int>(std::lround(std::sqrt(target * aspect)));
        const int rw = static_cast<int>(std::lround(std::sqrt(target / aspect)));
        if (rw < 1 || rh < 1 || rw > w || rh > h) continue;
        // Rounding may push the realised area outside the requested range.
        const double frac = static_cast<double>(rw) * rh / total;
        if (frac < p.area_min || frac > p.area_max) continue;
        const int x0 = static_cast<int>(rng.uniform_int(0, w - rw));
        const int y0 = static_cast<int>(rng.uniform_int(0, h - rh));
        out.mask.drop_rect(x0, y0, x0 + rw, y0 + rh);
        out.fitted = true;
        break;
    }
    return out;
}

BinaryMask sample_has(Rng& rng, int w, int h, const HasParams& p) {
    validate(p);
    AID_CHECK(p.grid_rows <= h && p.grid_cols <= w, "has: grid does not fit the image");
    BinaryMask mask(w, h);
    const int ph = h / p.grid_rows;
    const int pw = w / p.grid_cols;
    for (int r = 0; r < p.grid_rows; ++r) {
        const int y0 = r * ph;
        const int y1 = r + 1 == p.grid_rows ? h : y0 + ph;
        for (int c = 0; c < p.grid_cols; ++c) {
            const int x0 = c * pw;
            const int x1 = c + 1 == p.grid_cols ? w : x0 + pw;
            if (rng.bernoulli(p.drop_prob)) mask.drop_rect(x0, y0, x1, y1);
        }
    }
    return mask;
}

PeriodRange resolved_periods(const GridMaskParams& p, int w, int h) {
    if (p.period_min != 0 || p.period_max != 0) return {p.period_min, p.period_max};
    const int lo = std::max(2, std::min(w, h) / 8);
    return {lo, std::max(lo, std::min(w, h) / 4)};
}

BinaryMask rasterize_gridmask(int w, int h, int period, int side, int offset_x, int offset_y,
                              double angle_deg) {
    AID_CHECK(period >= 1 && side >= 0 && side < period, "gridmask: need 0 <= side < period");
    BinaryMask mask(w, h);
    if (side == 0) return mask;
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const bool axis_aligned = angle_deg == 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double u = x;
            double v = y;
            if (!axis_aligned) {
                u = cs * (x - cx) + sn * (y - cy) + cx;
                v = -sn * (x - cx) + cs * (y - cy) + cy;
            }
            if (floor_mod(u - offset_x, period) < side && floor_mod(v - offset_y, period) < side)
                mask.set(x, y, true);
        }
    }
    return mask;
}

BinaryMask sample_gridmask(Rng& rng, int w, int h, const GridMaskParams& p) {
    AID_CHECK(w >= 1 && h >= 1, "gridmask: image must be at least 1 x 1");
    validate(p);
    const auto [lo, hi] = resolved_periods(p, w, h);
    const int d = static_cast<int>(rng.uniform_int(lo, hi));
    // Ties round to even.
    const int side = static_cast<int>(std::nearbyint(p.ratio * d));
    AID_CHECK(side < d, "gridmask: dropped square must be smaller than the period");
    const int ox = static_cast<int>(rng.uniform_int(0, d - 1));
    const int oy = static_cast<int>(rng.uniform_int(0, d - 1));
    const double angle = rng.uniform(-p.rotate_max_deg, p.rotate_max_deg);
    return rasterize_gridmask(w, h, d, side, ox, oy, angle);
}

std::optional<BinaryMask> sample_aid_mask(Rng& rng, int w, int h, const AidConfig& cfg) {
    AID_CHECK(cfg.apply_prob >= 0.0 && cfg.apply_prob <= 1.0, "apply_prob must lie in [0, 1]");
    if (!rng.bernoulli(cfg.apply_prob)) return std::nullopt;
    switch (cfg.method) {
        case DropMethod::none: return std::nullopt;
        case DropMethod::cutout: return sample_cutout(rng, w, h, cfg.cutout);
        case DropMethod::random_erase: return sample_random_erase(rng, w, h, cfg.random_erase).mask;
        case DropMethod::has: return sample_has(rng, w, h, cfg.has);
        case DropMethod::gridmask: return sample_gridmask(rng, w, h, cfg.gridmask);
    }
    return std::nullopt;
}

ImageBuffer apply_mask(const ImageBuffer& img, const BinaryMask& mask, const FillPolicy& fill) {
    if (img.width() != mask.width() || img.height() != mask.height())
        throw InvalidArgument("apply_mask: mask is " + std::to_string(mask.width()) + "x" +
                              std::to_string(mask.height()) + " but image is " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()));
    ImageBuffer out = img;
    const auto values = fill_values(fill, img);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (mask.dropped(x, y))
                for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = values[c];
    return out;
}

std::vector<bool> keypoints_dropped(const KeypointInstance& instance, const BinaryMask& mask) {
    std::vector<bool> out(instance.keypoints.size(), false);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& k = instance.keypoints[i];
        if (!k.labeled()) continue;
        const double px = std::floor(k.x + 0.5);
        const double py = std::floor(k.y + 0.5);
        if (px < 0 || py < 0 || px >= mask.width() || py >= mask.height()) continue;
        out[i] = mask.dropped(static_cast<int>(px), static_cast<int>(py));
    }
    return out;
}

}  // namespace aid

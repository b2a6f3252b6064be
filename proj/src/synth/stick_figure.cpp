#include "aid/synth/stick_figure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aid/error.hpp"

namespace aid::synth {
namespace {

struct Vec {
    double x, y;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
Vec polar(double angle) { return {std::cos(angle), std::sin(angle)}; }

double segment_distance(double px, double py, Vec a, Vec b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

struct Figure {
    Vec neck, head, elbow_l, elbow_r, hand_l, hand_r, hip;
};

Figure sample_figure(Rng& rng, const StickFigureParams& p) {
    const double tilt = rng.uniform(-p.body_tilt_max, p.body_tilt_max);
    const double neck_len = rng.uniform(p.neck_length_min, p.neck_length_max);
    // Both arms share their segment lengths.
    const double upper = rng.uniform(p.upper_arm_min, p.upper_arm_max);
    const double fore = rng.uniform(p.forearm_min, p.forearm_max);
    const double a_l = std::numbers::pi + tilt + rng.uniform(-p.shoulder_spread, p.shoulder_spread);
    const double a_r = tilt + rng.uniform(-p.shoulder_spread, p.shoulder_spread);
    const double b_l = rng.uniform(-p.elbow_bend_max, p.elbow_bend_max);
    const double b_r = rng.uniform(-p.elbow_bend_max, p.elbow_bend_max);
    const double nx = rng.uniform(0.0, p.image_width - 1.0);
    const double ny = rng.uniform(0.0, p.image_height - 1.0);

    Figure f;
    f.neck = {nx, ny};
    const Vec up{std::sin(tilt), -std::cos(tilt)};
    f.head = f.neck + neck_len * up;
    f.hip = f.neck + (-p.torso_length) * up;
    f.elbow_l = f.neck + upper * polar(a_l);
    f.elbow_r = f.neck + upper * polar(a_r);
    f.hand_l = f.elbow_l + fore * polar(a_l + b_l);
    f.hand_r = f.elbow_r + fore * polar(a_r + b_r);
    return f;
}

bool inside(const Figure& f, const StickFigureParams& p) {
    const double m = std::max({p.head_radius, p.elbow_radius, p.hand_radius}) + 1.0;
    for (Vec v : {f.head, f.elbow_l, f.elbow_r, f.hand_l, f.hand_r})
        if (v.x < m || v.y < m || v.x > p.image_width - 1 - m || v.y > p.image_height - 1 - m)
            return false;
    return true;
}

ImageBuffer render(Rng& rng, const Figure& f, const StickFigureParams& p) {
    const int w = p.image_width, h = p.image_height;
    std::vector<double> canvas(static_cast<std::size_t>(w) * h, p.background);
    auto px = [&](int x, int y) -> double& { return canvas[static_cast<std::size_t>(y) * w + x]; };

    const std::pair<Vec, Vec> limbs[] = {{f.neck, f.head},    {f.neck, f.hip},
                                         {f.neck, f.elbow_l}, {f.elbow_l, f.hand_l},
                                         {f.neck, f.elbow_r}, {f.elbow_r, f.hand_r}};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (const auto& [a, b] : limbs) {
                const double cover = std::clamp(p.limb_half_width + 0.5 - segment_distance(x, y, a, b), 0.0, 1.0);
                px(x, y) = std::max(px(x, y), p.background + (p.limb_intensity - p.background) * cover);
            }

    const struct {
        Vec c;
        double radius, intensity;
    } blobs[] = {{f.head, p.head_radius, p.head_intensity},
                 {f.elbow_l, p.elbow_radius, p.elbow_intensity},
                 {f.elbow_r, p.elbow_radius, p.elbow_intensity},
                 {f.hand_l, p.hand_radius, p.hand_intensity},
                 {f.hand_r, p.hand_radius, p.hand_intensity}};
    for (const auto& b : blobs) {
        const int r = static_cast<int>(std::ceil(3.0 * b.radius));
        const int cx = static_cast<int>(std::floor(b.c.x + 0.5));
        const int cy = static_cast<int>(std::floor(b.c.y + 0.5));
        for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y)
            for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x) {
                const double d2 = (x - b.c.x) * (x - b.c.x) + (y - b.c.y) * (y - b.c.y);
                const double v = p.background + (b.intensity - p.background) *
                                                    std::exp(-d2 / (2.0 * b.radius * b.radius));
                px(x, y) = std::max(px(x, y), v);
            }
    }

    ImageBuffer img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = px(x, y);
            if (p.noise_std > 0) v += rng.normal(0.0, p.noise_std);
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
        }
    return img;
}

}  // namespace

void validate(const StickFigureParams& p) {
    AID_CHECK(p.image_width >= 8 && p.image_height >= 8, "stick figure image must be at least 8 x 8");
    AID_CHECK(p.image_width % 4 == 0 && p.image_height % 4 == 0,
              "stick figure image size must be a multiple of 4");
    AID_CHECK(p.neck_length_min > 0 && p.neck_length_min <= p.neck_length_max, "bad neck length range");
    AID_CHECK(p.upper_arm_min > 0 && p.upper_arm_min <= p.upper_arm_max, "bad upper arm range");
    AID_CHECK(p.forearm_min > 0 && p.forearm_min <= p.forearm_max, "bad forearm range");
    AID_CHECK(p.noise_std >= 0, "noise_std must be >= 0");
    AID_CHECK(p.occluder_min >= 1 && p.occluder_min <= p.occluder_max, "bad occluder size range");
    AID_CHECK(p.max_attempts >= 1, "max_attempts must be >= 1");
}

const KeypointLayout& stick_figure_layout() {
    static const KeypointLayout layout = KeypointLayout::from_names(
        {"head", "left_elbow", "right_elbow", "left_hand", "right_hand"},
        {{0, 1}, {0, 2}, {1, 3}, {2, 4}});
    return layout;
}

std::vector<Sample> generate_dataset(Rng& rng, int n, const StickFigureParams& p) {
    AID_CHECK(n >= 1, "dataset size must be >= 1");
    validate(p);
    std::vector<Sample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Figure f{};
        bool placed = false;
        for (int attempt = 0; attempt < p.max_attempts && !placed; ++attempt) {
            f = sample_figure(rng, p);
            placed = inside(f, p);
        }
        if (!placed)
            throw InvalidArgument("could not place a stick figure inside the image after " +
                                  std::to_string(p.max_attempts) +
                                  " attempts; use shorter limbs or a larger image");
        Sample s;
        s.image = render(rng, f, p);
        s.instance.id = i + 1;
        s.instance.image_id = i + 1;
        for (Vec v : {f.head, f.elbow_l, f.elbow_r, f.hand_l, f.hand_r})
            s.instance.keypoints.push_back({v.x, v.y, Visibility::visible});
        double x0 = f.hip.x, x1 = x0, y0 = f.hip.y, y1 = y0;
        for (const auto& k : s.instance.keypoints) {
            x0 = std::min(x0, k.x);
            x1 = std::max(x1, k.x);
            y0 = std::min(y0, k.y);
            y1 = std::max(y1, k.y);
        }
        s.instance.bbox = {x0, y0, x1 - x0, y1 - y0};
        s.instance.area = std::max(1.0, (x1 - x0) * (y1 - y0));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<OccludedSample> occlude_test_set(Rng& rng, const std::vector<Sample>& samples,
                                             double rate, const StickFigureParams& p) {
    AID_CHECK(rate >= 0.0 && rate <= 1.0, "occlusion rate must lie in [0, 1]");
    validate(p);
    const auto value = static_cast<std::uint8_t>(std::clamp(std::floor(p.occluder_value + 0.5), 0.0, 255.0));
    std::vector<OccludedSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        OccludedSample o{s.image, s.instance, std::vector<bool>(s.instance.keypoints.size(), false)};
        for (std::size_t k = 0; k < s.instance.keypoints.size(); ++k) {
            const auto& kp = s.instance.keypoints[k];
            if (!kp.labeled() || !rng.bernoulli(rate)) continue;
            const int size = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(p.occluder_min)),
                                                              static_cast<std::int64_t>(std::floor(p.occluder_max))));
            const int slack = std::max(0, size / 2 - 3);
            const int jx = static_cast<int>(rng.uniform_int(-slack, slack));
            const int jy = static_cast<int>(rng.uniform_int(-slack, slack));
            const int cx = static_cast<int>(std::floor(kp.x + 0.5));
            const int cy = static_cast<int>(std::floor(kp.y + 0.5));
            const int x0 = cx - size / 2 + jx;
            const int y0 = cy - size / 2 + jy;
            for (int y = std::max(0, y0); y < std::min(o.image.height(), y0 + size); ++y)
                for (int x = std::max(0, x0); x < std::min(o.image.width(), x0 + size); ++x)
                    for (int c = 0; c < o.image.channels(); ++c) o.image.at(x, y, c) = value;
            o.occluded[k] = true;
        }
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace aid::synth

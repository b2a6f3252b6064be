#include "aid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aid/error.hpp"

namespace aid {

AffineTransform::AffineTransform(double a, double b, double c, double d, double e, double f)
    : m_{a, b, c, d, e, f} {}

AffineTransform AffineTransform::translation(double tx, double ty) {
    return {1.0, 0.0, tx, 0.0, 1.0, ty};
}

AffineTransform AffineTransform::scaling(double sx, double sy) {
    return {sx, 0.0, 0.0, 0.0, sy, 0.0};
}

AffineTransform AffineTransform::rotation(double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return {c, -s, 0.0, s, c, 0.0};
}

AffineTransform AffineTransform::horizontal_flip(int width) {
    return {-1.0, 0.0, static_cast<double>(width - 1), 0.0, 1.0, 0.0};
}

Point2 AffineTransform::apply(Point2 p) const noexcept {
    return {m_[0] * p.x + m_[1] * p.y + m_[2], m_[3] * p.x + m_[4] * p.y + m_[5]};
}

bool AffineTransform::invertible() const noexcept {
    const double det = determinant();
    return std::isfinite(det) && det != 0.0;
}

AffineTransform AffineTransform::inverse() const {
    if (!invertible()) throw InvalidArgument("affine transform is not invertible");
    const double det = determinant();
    const double a = m_[4] / det;
    const double b = -m_[1] / det;
    const double d = -m_[3] / det;
    const double e = m_[0] / det;
    return {a, b, -(a * m_[2] + b * m_[5]), d, e, -(d * m_[2] + e * m_[5])};
}

AffineTransform AffineTransform::compose(const AffineTransform& first) const noexcept {
    const auto& f = first.m_;
    return {m_[0] * f[0] + m_[1] * f[3],
            m_[0] * f[1] + m_[1] * f[4],
            m_[0] * f[2] + m_[1] * f[5] + m_[2],
            m_[3] * f[0] + m_[4] * f[3],
            m_[3] * f[1] + m_[4] * f[4],
            m_[3] * f[2] + m_[4] * f[5] + m_[5]};
}

std::string_view to_string(AidOrder order) {
    return order == AidOrder::before_geometry ? "before_geometry" : "after_geometry";
}

AidOrder parse_aid_order(std::string_view text) {
    if (text == "before_geometry") return AidOrder::before_geometry;
    if (text == "after_geometry") return AidOrder::after_geometry;
    throw InvalidArgument("unknown aid order '" + std::string(text) + "'");
}

std::string_view to_string(CropMode mode) {
    return mode == CropMode::top_down ? "top_down" : "bottom_up";
}

CropMode parse_crop_mode(std::string_view text) {
    if (text == "top_down") return CropMode::top_down;
    if (text == "bottom_up") return CropMode::bottom_up;
    throw InvalidArgument("unknown crop mode '" + std::string(text) + "'");
}

void validate(const GeomConfig& cfg) {
    AID_CHECK(cfg.flip_prob >= 0.0 && cfg.flip_prob <= 1.0, "flip_prob must lie in [0, 1]");
    AID_CHECK(cfg.scale_min > 0.0 && cfg.scale_min <= cfg.scale_max,
              "scale range must satisfy 0 < scale_min <= scale_max");
    AID_CHECK(cfg.rotation_max_deg >= 0.0, "rotation_max_deg must be >= 0");
    AID_CHECK(cfg.output_width >= 1 && cfg.output_height >= 1, "output size must be positive");
}

BoundingBox image_region(int width, int height) {
    return {-0.5, -0.5, static_cast<double>(width), static_cast<double>(height)};
}

AffineTransform region_transform(const BoundingBox& region, int output_width, int output_height,
                                 double scale, double rotation_deg, bool flip) {
    if (!(region.w > 0.0) || !(region.h > 0.0))
        throw InvalidArgument("degenerate region: width and height must be positive");
    AID_CHECK(output_width >= 1 && output_height >= 1, "output size must be positive");
    AID_CHECK(scale > 0.0, "scale must be positive");

    const double cx = region.x + region.w / 2.0;
    const double cy = region.y + region.h / 2.0;
    const double aspect = static_cast<double>(output_width) / output_height;
    double rw = region.w;
    if (region.w / region.h <= aspect) rw = region.h * aspect;
    const double s = scale * output_width / rw;

    const double theta = rotation_deg * std::numbers::pi / 180.0;
    const double cs = s * std::cos(theta);
    const double sn = s * std::sin(theta);
    const double ox = (output_width - 1) / 2.0;
    const double oy = (output_height - 1) / 2.0;
    AffineTransform t(cs, -sn, ox - (cs * cx - sn * cy), sn, cs, oy - (sn * cx + cs * cy));
    if (flip) t = AffineTransform::horizontal_flip(output_width).compose(t);
    return t;
}

SampledTransform sample_transform(Rng& rng, const BoundingBox& region, const GeomConfig& cfg) {
    validate(cfg);
    if (!(region.w > 0.0) || !(region.h > 0.0))
        throw InvalidArgument("degenerate bbox: width and height must be positive");
    SampledTransform out;
    out.flipped = rng.bernoulli(cfg.flip_prob);
    out.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
    out.rotation_deg = rng.uniform(-cfg.rotation_max_deg, cfg.rotation_max_deg);
    out.transform = region_transform(region, cfg.output_width, cfg.output_height, out.scale,
                                     out.rotation_deg, out.flipped);
    return out;
}

ImageBuffer warp_image(const ImageBuffer& img, const AffineTransform& t, int output_width,
                       int output_height, const FillPolicy& fill) {
    const AffineTransform inv = t.inverse();
    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    const auto fv = fill_values(fill, img);
    ImageBuffer out(output_width, output_height, ch);
    for (int v = 0; v < output_height; ++v) {
        for (int u = 0; u < output_width; ++u) {
            const Point2 p = inv.apply({static_cast<double>(u), static_cast<double>(v)});
            if (!(p.x >= -0.5 && p.x <= w - 0.5 && p.y >= -0.5 && p.y <= h - 0.5)) {
                for (int c = 0; c < ch; ++c) out.at(u, v, c) = fv[c];
                continue;
            }
            const double x = std::clamp(p.x, 0.0, static_cast<double>(w - 1));
            const double y = std::clamp(p.y, 0.0, static_cast<double>(h - 1));
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = x - x0;
            const double fy = y - y0;
            for (int c = 0; c < ch; ++c) {
                const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
                const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
                const double val = (1.0 - fy) * top + fy * bot;
                out.at(u, v, c) = static_cast<std::uint8_t>(std::clamp(std::floor(val + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

BinaryMask warp_mask(const BinaryMask& mask, const AffineTransform& t, int output_width,
                     int output_height) {
    const AffineTransform inv = t.inverse();
    BinaryMask out(output_width, output_height);
    for (int v = 0; v < output_height; ++v) {
        for (int u = 0; u < output_width; ++u) {
            const Point2 p = inv.apply({static_cast<double>(u), static_cast<double>(v)});
            const double x = std::floor(p.x + 0.5);
            const double y = std::floor(p.y + 0.5);
            if (x < 0 || y < 0 || x >= mask.width() || y >= mask.height()) continue;
            out.set(u, v, mask.dropped(static_cast<int>(x), static_cast<int>(y)));
        }
    }
    return out;
}

KeypointInstance transform_keypoints(const KeypointInstance& instance, const AffineTransform& t,
                                     bool flip, const KeypointLayout& layout) {
    KeypointInstance out = instance;
    std::vector<Keypoint> mapped = instance.keypoints;
    for (auto& k : mapped) {
        if (!k.labeled()) continue;
        const Point2 p = t.apply({k.x, k.y});
        k.x = p.x;
        k.y = p.y;
    }
    if (flip) {
        AID_CHECK(layout.size() == mapped.size(), "layout does not match the keypoint count");
        const auto& perm = layout.flip_index();
        for (std::size_t i = 0; i < mapped.size(); ++i) out.keypoints[i] = mapped[perm[i]];
    } else {
        out.keypoints = std::move(mapped);
    }

    const auto& b = instance.bbox;
    const Point2 corners[4] = {t.apply({b.x, b.y}), t.apply({b.x + b.w, b.y}),
                               t.apply({b.x, b.y + b.h}), t.apply({b.x + b.w, b.y + b.h})};
    double x0 = corners[0].x, x1 = x0, y0 = corners[0].y, y1 = y0;
    for (const auto& c : corners) {
        x0 = std::min(x0, c.x);
        x1 = std::max(x1, c.x);
        y0 = std::min(y0, c.y);
        y1 = std::max(y1, c.y);
    }
    out.bbox = {x0, y0, x1 - x0, y1 - y0};
    out.area = instance.area * std::fabs(t.determinant());
    return out;
}

AugmentedSample augment_sample(Rng& rng, const ImageBuffer& image, const KeypointInstance& instance,
                               const KeypointLayout& layout, const GeomConfig& geom,
                               const AidConfig& aid) {
    const BoundingBox region = geom.mode == CropMode::top_down
                                   ? instance.bbox
                                   : image_region(image.width(), image.height());
    AugmentedSample out;
    out.transform = sample_transform(rng, region, geom);
    const auto& t = out.transform.transform;
    if (geom.aid_order == AidOrder::before_geometry) {
        const auto mask = sample_aid_mask(rng, image.width(), image.height(), aid);
        const ImageBuffer src = mask ? apply_mask(image, *mask, aid.fill) : image;
        out.image = warp_image(src, t, geom.output_width, geom.output_height, aid.fill);
        if (mask) out.mask = warp_mask(*mask, t, geom.output_width, geom.output_height);
    } else {
        out.image = warp_image(image, t, geom.output_width, geom.output_height, aid.fill);
        out.mask = sample_aid_mask(rng, geom.output_width, geom.output_height, aid);
        if (out.mask) out.image = apply_mask(out.image, *out.mask, aid.fill);
    }
    out.instance = transform_keypoints(instance, t, out.transform.flipped, layout);
    return out;
}

}  // namespace aid

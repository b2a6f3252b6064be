#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "aid/image.hpp"
#include "aid/keypoints.hpp"
#include "aid/masking.hpp"
#include "aid/rng.hpp"

namespace aid {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// 2x3 affine map from source continuous coordinates to output coordinates:
/// [x'; y'] = [a b; d e] [x; y] + [c; f].
class AffineTransform {
public:
    AffineTransform() = default;
    AffineTransform(double a, double b, double c, double d, double e, double f);

    static AffineTransform identity() { return {}; }
    static AffineTransform translation(double tx, double ty);
    static AffineTransform scaling(double sx, double sy);
    /// Counter-clockwise in image coordinates with y pointing down appears
    /// clockwise on screen; angle in radians.
    static AffineTransform rotation(double radians);
    /// Horizontal mirror of a `width`-pixel image: x -> width - 1 - x.
    static AffineTransform horizontal_flip(int width);

    Point2 apply(Point2 p) const noexcept;
    double determinant() const noexcept { return m_[0] * m_[4] - m_[1] * m_[3]; }
    bool invertible() const noexcept;
    AffineTransform inverse() const;
    /// (*this) after `first`: p -> this(first(p)).
    AffineTransform compose(const AffineTransform& first) const noexcept;

    const std::array<double, 6>& coefficients() const noexcept { return m_; }

private:
    std::array<double, 6> m_{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
};

enum class AidOrder { before_geometry, after_geometry };
enum class CropMode { top_down, bottom_up };

std::string_view to_string(AidOrder order);
AidOrder parse_aid_order(std::string_view text);
std::string_view to_string(CropMode mode);
CropMode parse_crop_mode(std::string_view text);

struct GeomConfig {
    double flip_prob = 0.5;
    double scale_min = 0.75;
    double scale_max = 1.25;
    double rotation_max_deg = 30.0;
    int output_width = 192;
    int output_height = 256;
    AidOrder aid_order = AidOrder::after_geometry;
    CropMode mode = CropMode::top_down;

    bool operator==(const GeomConfig&) const = default;
};

void validate(const GeomConfig& cfg);

struct SampledTransform {
    /// Includes the horizontal mirror when `flipped`.
    AffineTransform transform;
    bool flipped = false;
    double scale = 1.0;
    double rotation_deg = 0.0;
};

/// Full-image region for bottom-up mode.
BoundingBox image_region(int width, int height);

/// Deterministic part of the transform: the region centre goes to the
/// output centre, the region (expanded to the output aspect ratio) is
/// fitted to the output, then scaled by `scale`, rotated, and optionally
/// mirrored about the output's vertical centre line.
AffineTransform region_transform(const BoundingBox& region, int output_width, int output_height,
                                 double scale, double rotation_deg, bool flip);

/// Draws flip, then scale, then rotation. Throws on a degenerate region.
SampledTransform sample_transform(Rng& rng, const BoundingBox& region, const GeomConfig& cfg);

/// Bilinear resampling. Output pixels whose preimage falls outside the
/// source extent [-0.5, W-0.5] x [-0.5, H-0.5] take the fill value; taps
/// beyond the last pixel centre are clamped to the border.
ImageBuffer warp_image(const ImageBuffer& img, const AffineTransform& t, int output_width,
                       int output_height, const FillPolicy& fill);
BinaryMask warp_mask(const BinaryMask& mask, const AffineTransform& t, int output_width,
                     int output_height);

/// Maps labeled keypoints through `t` (unlabeled ones are left as they
/// are), swaps left/right indices when `flip`, and maps the box to the
/// bounding box of its transformed corners with area scaled by |det t|.
KeypointInstance transform_keypoints(const KeypointInstance& instance, const AffineTransform& t,
                                     bool flip, const KeypointLayout& layout);

/// One training sample after geometry and information dropping.
struct AugmentedSample {
    ImageBuffer image;
    KeypointInstance instance;
    SampledTransform transform;
    /// In output coordinates; absent if the sample was not masked.
    std::optional<BinaryMask> mask;
};

/// Geometry plus AID in the order given by `geom.aid_order`. The
/// annotation only ever passes through `transform_keypoints`.
AugmentedSample augment_sample(Rng& rng, const ImageBuffer& image, const KeypointInstance& instance,
                               const KeypointLayout& layout, const GeomConfig& geom,
                               const AidConfig& aid);

}  // namespace aid

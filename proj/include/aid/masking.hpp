#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aid/image.hpp"
#include "aid/keypoints.hpp"
#include "aid/mask.hpp"
#include "aid/rng.hpp"

namespace aid {

/// What is written into dropped pixels.
struct FillPolicy {
    enum class Mode { constant, dataset_mean, per_image_mean };

    Mode mode = Mode::dataset_mean;
    /// Per-channel values for `constant` and `dataset_mean`. A single value
    /// is broadcast over all channels.
    std::vector<double> values{127.0};

    static FillPolicy constant(std::vector<double> v) { return {Mode::constant, std::move(v)}; }
    static FillPolicy dataset_mean(std::vector<double> v) { return {Mode::dataset_mean, std::move(v)}; }
    static FillPolicy per_image_mean() { return {Mode::per_image_mean, {}}; }

    bool operator==(const FillPolicy&) const = default;
};

std::string_view to_string(FillPolicy::Mode mode);
FillPolicy::Mode parse_fill_mode(std::string_view text);
void validate(const FillPolicy& fill);

/// Resolved per-channel fill values for `img`, rounded to 8 bits.
std::vector<std::uint8_t> fill_values(const FillPolicy& fill, const ImageBuffer& img);

/// Per-channel mean over a set of images (pixel-weighted).
std::vector<double> dataset_mean(const std::vector<ImageBuffer>& images);

// Cutout: `num_holes` hole_w x hole_h rectangles with centres uniform over
// the pixel grid, clipped at the border. A zero size means 25% of min(w, h).
struct CutoutParams {
    int num_holes = 1;
    int hole_w = 0;
    int hole_h = 0;

    bool operator==(const CutoutParams&) const = default;
};

struct RandomEraseParams {
    double area_min = 0.02;
    double area_max = 0.4;
    double aspect_min = 0.3;
    double aspect_max = 3.3;
    int max_attempts = 100;

    bool operator==(const RandomEraseParams&) const = default;
};

// Hide-and-Seek: grid patches dropped independently; the last row/column
// absorbs the remainder when the grid does not divide the image.
struct HasParams {
    int grid_rows = 4;
    int grid_cols = 4;
    double drop_prob = 0.3;

    bool operator==(const HasParams&) const = default;
};

// GridMask: one dropped square of side round(ratio * d) per d x d tile (ties to even).
// Zero period bounds mean [min(w,h)/8, min(w,h)/4].
struct GridMaskParams {
    int period_min = 0;
    int period_max = 0;
    double ratio = 0.4;
    double rotate_max_deg = 0.0;

    bool operator==(const GridMaskParams&) const = default;
};

void validate(const CutoutParams& p);
void validate(const RandomEraseParams& p);
void validate(const HasParams& p);
void validate(const GridMaskParams& p);

enum class DropMethod { none, cutout, random_erase, has, gridmask };

std::string_view to_string(DropMethod method);
DropMethod parse_drop_method(std::string_view text);

/// One information-dropping configuration. Parameters of every method are
/// carried so a config can be switched between methods without losing them.
struct AidConfig {
    DropMethod method = DropMethod::cutout;
    double apply_prob = 0.5;
    FillPolicy fill;
    CutoutParams cutout;
    RandomEraseParams random_erase;
    HasParams has;
    GridMaskParams gridmask;

    bool operator==(const AidConfig&) const = default;
};

void validate(const AidConfig& cfg);

/// Hole side used for a `w` x `h` image (resolves the zero default).
int resolved_hole_w(const CutoutParams& p, int w, int h);
int resolved_hole_h(const CutoutParams& p, int w, int h);

/// Drops the hole_w x hole_h rectangle whose top-left corner is
/// (cx - hole_w / 2, cy - hole_h / 2), clipped to the mask.
void draw_cutout_hole(BinaryMask& mask, int cx, int cy, int hole_w, int hole_h);

BinaryMask sample_cutout(Rng& rng, int w, int h, const CutoutParams& p);

struct RandomEraseDraw {
    BinaryMask mask;
    /// False when no rectangle fitted within the attempt budget (mask all-keep).
    bool fitted = false;
};
RandomEraseDraw sample_random_erase(Rng& rng, int w, int h, const RandomEraseParams& p);

BinaryMask sample_has(Rng& rng, int w, int h, const HasParams& p);

struct PeriodRange {
    int lo = 0;
    int hi = 0;
};
PeriodRange resolved_periods(const GridMaskParams& p, int w, int h);

/// Rasterises a lattice of `side` x `side` squares repeating every `period`
/// pixels, offset by (offset_x, offset_y) and rotated by `angle_deg` about
/// the image centre. A pixel is dropped when its centre falls in a square.
BinaryMask rasterize_gridmask(int w, int h, int period, int side, int offset_x, int offset_y,
                              double angle_deg);

/// Draws the period, the phase offsets, then the rotation angle.
BinaryMask sample_gridmask(Rng& rng, int w, int h, const GridMaskParams& p);

/// Draws the apply/skip decision, then the method's mask. Returns nothing
/// when the sample is left untouched.
std::optional<BinaryMask> sample_aid_mask(Rng& rng, int w, int h, const AidConfig& cfg);

/// Replaces dropped pixels; kept pixels are copied bit for bit.
ImageBuffer apply_mask(const ImageBuffer& img, const BinaryMask& mask, const FillPolicy& fill);

/// Diagnostic only: whether each keypoint's nearest pixel is dropped.
/// Unlabeled and out-of-image keypoints report false.
std::vector<bool> keypoints_dropped(const KeypointInstance& instance, const BinaryMask& mask);

}  // namespace aid

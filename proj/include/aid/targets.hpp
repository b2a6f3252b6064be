#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "aid/keypoints.hpp"

namespace aid {

/// K response maps of height x width cells. Cell (u, v) of the output grid
/// sits at input coordinate (u * stride, v * stride).
class HeatmapStack {
public:
    HeatmapStack() = default;
    HeatmapStack(int num_maps, int height, int width, double stride, double sigma);

    int num_maps() const noexcept { return num_maps_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    double stride() const noexcept { return stride_; }
    double sigma() const noexcept { return sigma_; }

    double& at(int k, int v, int u) { return values_[index(k, v, u)]; }
    double at(int k, int v, int u) const { return values_[index(k, v, u)]; }

    std::span<double> map(int k);
    std::span<const double> map(int k) const;
    const std::vector<double>& values() const noexcept { return values_; }

    bool operator==(const HeatmapStack&) const = default;

private:
    std::size_t index(int k, int v, int u) const {
        return (static_cast<std::size_t>(k) * height_ + v) * width_ + u;
    }

    int num_maps_ = 0;
    int height_ = 0;
    int width_ = 0;
    double stride_ = 1.0;
    double sigma_ = 1.0;
    std::vector<double> values_;
};

/// Cells farther than this many sigmas from the keypoint are left at zero.
inline constexpr double kTruncationSigmas = 3.0;

/// Unnormalised Gaussians (peak 1) centred at (x / stride, y / stride).
/// Takes no image: the supervision cannot depend on any pixel masking.
HeatmapStack render_heatmaps(const KeypointInstance& instance, int out_height, int out_width,
                             double stride, double sigma);

struct DecodedKeypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;
};

/// Argmax (first maximum in row-major order wins) refined by a quarter-cell
/// step toward the larger neighbour on each axis, scaled back by the stride.
/// An all-zero map decodes to the grid centre with confidence 0.
std::vector<DecodedKeypoint> decode_heatmaps(const HeatmapStack& stack);

/// Same decoding on a raw K x H x W float buffer.
std::vector<DecodedKeypoint> decode_heatmaps(std::span<const float> values, int num_maps,
                                             int height, int width, double stride);

/// File layout: one line of JSON header
///   {"format":"aid-heatmap","version":1,"dtype":"float64","byte_order":"little",
///    "shape":[K,H,W],"stride":s,"sigma":g}
/// terminated by '\n', then K*H*W little-endian IEEE-754 doubles, row-major.
void write_heatmap_file(const std::filesystem::path& path, const HeatmapStack& stack);
HeatmapStack read_heatmap_file(const std::filesystem::path& path);

}  // namespace aid

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aid {

/// Row-major 8-bit image with interleaved channels.
///
/// Coordinate convention (used by every module): pixel (x, y) is column x,
/// row y, and its center sits at the continuous coordinate (x, y). The
/// continuous extent of a W x H image is therefore [-0.5, W - 0.5] x
/// [-0.5, H - 0.5].
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<std::uint8_t> data() noexcept { return data_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }

    bool operator==(const ImageBuffer&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-channel mean over all pixels.
std::vector<double> channel_mean(const ImageBuffer& img);

}  // namespace aid

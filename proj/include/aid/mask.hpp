#pragma once

#include <cstdint>
#include <vector>

namespace aid {

/// Per-pixel keep/drop flags. A set flag means the pixel is dropped.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool dropped = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool dropped(int x, int y) const {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool drop) {
        bits_[static_cast<std::size_t>(y) * width_ + x] = drop ? 1 : 0;
    }
    /// Marks the rectangle [x0, x1) x [y0, y1), clipped to the mask.
    void drop_rect(int x0, int y0, int x1, int y1);

    std::size_t dropped_count() const noexcept;
    double drop_fraction() const noexcept;

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

}  // namespace aid

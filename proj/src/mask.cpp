#include "aid/mask.hpp"

#include <algorithm>
#include <numeric>

#include "aid/error.hpp"

namespace aid {

BinaryMask::BinaryMask(int width, int height, bool dropped)
    : width_(width), height_(height) {
    AID_CHECK(width >= 0 && height >= 0, "mask dimensions must be non-negative");
    bits_.assign(static_cast<std::size_t>(width) * height, dropped ? 1 : 0);
}

void BinaryMask::drop_rect(int x0, int y0, int x1, int y1) {
    x0 = std::clamp(x0, 0, width_);
    x1 = std::clamp(x1, 0, width_);
    y0 = std::clamp(y0, 0, height_);
    y1 = std::clamp(y1, 0, height_);
    for (int y = y0; y < y1; ++y)
        std::fill_n(bits_.begin() + static_cast<std::ptrdiff_t>(y) * width_ + x0,
                    std::max(0, x1 - x0), std::uint8_t{1});
}

std::size_t BinaryMask::dropped_count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double BinaryMask::drop_fraction() const noexcept {
    if (bits_.empty()) return 0.0;
    return static_cast<double>(dropped_count()) / static_cast<double>(bits_.size());
}

}  // namespace aid

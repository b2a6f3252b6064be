#pragma once

#include <algorithm>
#include <cmath>

#include "aid/image.hpp"

// Bilinear sample of a single-channel image at a continuous source point,
// clamping taps to the border.

namespace oracle {

inline double bilinear(const aid::ImageBuffer& img, double sx, double sy) {
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const double fx = sx - x0;
    const double fy = sy - y0;
    auto px = [&](int x, int y) {
        x = std::clamp(x, 0, img.width() - 1);
        y = std::clamp(y, 0, img.height() - 1);
        return static_cast<double>(img.at(x, y));
    };
    const double top = px(x0, y0) * (1 - fx) + px(x0 + 1, y0) * fx;
    const double bottom = px(x0, y0 + 1) * (1 - fx) + px(x0 + 1, y0 + 1) * fx;
    return top * (1 - fy) + bottom * fy;
}

}  // namespace oracle

#pragma once

// Exact probability that a single Cutout hole covers a pixel, by
// enumerating every hole centre.

namespace oracle {

inline double cutout_cover_probability(int w, int h, int hole_w, int hole_h, int px, int py) {
    long covered = 0;
    for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < w; ++cx) {
            const int left = cx - hole_w / 2;
            const int top = cy - hole_h / 2;
            if (px >= left && px < left + hole_w && py >= top && py < top + hole_h) ++covered;
        }
    return static_cast<double>(covered) / (static_cast<double>(w) * h);
}

}  // namespace oracle

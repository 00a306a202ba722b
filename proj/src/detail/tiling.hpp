#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "sarsub/enhance.hpp"

namespace sarsub::detail {

// Mirror index into [0, n) without repeating the edge sample.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

struct TileLayout {
    int pad_before = 0;
    int padded = 0;
    std::vector<int> origins;  // in padded coordinates
};

inline TileLayout tile_layout(int extent, const TilingPlan& plan) {
    const int t = plan.tile_size, s = plan.stride();
    TileLayout l;
    l.pad_before = t - s;
    l.padded = std::max(extent + 2 * l.pad_before, t);
    for (int o = 0;; o += s) {
        if (o + t >= l.padded) {
            l.origins.push_back(l.padded - t);
            break;
        }
        l.origins.push_back(o);
    }
    return l;
}

inline std::vector<double> hann_weights(int t) {
    std::vector<double> w(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        const double s = std::sin(std::numbers::pi * (double(i) + 0.5) / double(t));
        w[std::size_t(i)] = s * s;
    }
    return w;
}

inline Plane extract_tile(const Plane& src, const TileLayout& ly, const TileLayout& lx, int oy, int ox, int t) {
    Plane tile(t, t);
    for (int y = 0; y < t; ++y) {
        const int sy = reflect_index(oy + y - ly.pad_before, src.height);
        for (int x = 0; x < t; ++x) tile.at(y, x) = src.at(sy, reflect_index(ox + x - lx.pad_before, src.width));
    }
    return tile;
}

}  // namespace sarsub::detail

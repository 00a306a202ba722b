#pragma once

#include <algorithm>
#include <vector>

#include "sarsub/fft.hpp"
#include "sarsub/subaperture.hpp"

namespace sarsub::detail {

// 1 / max(w, floor) per processed bin.
inline std::vector<double> deweight_gains(const SubapertureSpec& spec) {
    const int count = spec.processed_count();
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) g[std::size_t(i)] = 1.0 / std::max(spec.deweight.at(i, count), spec.deweight_floor);
    return g;
}

// Centered, de-weighted spectrum of one column; bins outside the processed band are zero.
inline void deweighted_spectrum(std::span<const cdouble> column, const SubapertureSpec& spec,
                                const std::vector<double>& gains, const Fft1d& fft, std::vector<cdouble>& scratch,
                                std::vector<cdouble>& centered) {
    const int n = spec.azimuth_size;
    fft.forward(column, scratch);
    std::fill(centered.begin(), centered.end(), cdouble{});
    const int begin = spec.processed_begin();
    for (int i = 0; i < spec.processed_count(); ++i) {
        const int s = begin + i;
        centered[std::size_t(s)] = scratch[std::size_t(fft_from_centered(s, n))] * gains[std::size_t(i)];
    }
}

inline void circular_shift(std::vector<cdouble>& v, int shift, std::vector<cdouble>& scratch) {
    const int n = int(v.size());
    const int s = ((shift % n) + n) % n;
    if (s == 0) return;
    for (int i = 0; i < n; ++i) scratch[std::size_t((i + s) % n)] = v[std::size_t(i)];
    std::copy(scratch.begin(), scratch.end(), v.begin());
}

}  // namespace sarsub::detail

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "sarsub/doppler.hpp"
#include "sarsub/fft.hpp"
#include "sarsub/parallel.hpp"
#include "sarsub/slc_sim.hpp"

namespace sarsub::detail {

// Azimuth shaping filter in FFT bin order plus the gain that maps an impulse to unit peak.
struct ShapingFilter {
    std::vector<cdouble> response;
    double impulse_scale = 1.0;
};

inline ShapingFilter make_shaping_filter(int n, const RadarParams& params) {
    const ProcessedBand band = processed_band(n, params);
    const WindowSpec window{WindowType::hamming, params.hamming_coefficient};
    double energy = 0.0, amplitude_sum = 0.0;
    for (int i = 0; i < band.count; ++i) {
        const double w = window.at(i, band.count);
        energy += w * w;
        amplitude_sum += w;
    }
    const double gain = std::sqrt(double(n) / energy);

    ShapingFilter f;
    f.response.assign(std::size_t(n), cdouble{});
    for (int i = 0; i < band.count; ++i) {
        const int s = band.begin + i;
        cdouble h = gain * window.at(i, band.count);
        if (params.residual_fm_rate != 0.0) {
            const double freq = double(s - n / 2) * params.azimuth_prf / double(n);
            h *= std::polar(1.0, std::numbers::pi * freq * freq / params.residual_fm_rate);
        }
        f.response[std::size_t(fft_from_centered(s, n))] = h;
    }
    f.impulse_scale = double(n) / (gain * amplitude_sum);
    return f;
}

// Per-column targets, indexed by range column.
inline std::vector<std::vector<PointTarget>> targets_by_column(const SceneSpec& spec) {
    std::vector<std::vector<PointTarget>> out(std::size_t(spec.width));
    for (const auto& t : spec.point_targets) out[std::size_t(t.rg)].push_back(t);
    return out;
}

// Simulates one range column into `column` (length n); `spectrum` is scratch.
inline void simulate_column(int rg, const SceneSpec& spec, const Plane& reflectivity,
                            const std::vector<PointTarget>& targets, const ShapingFilter& filter,
                            const Fft1d& fft, std::vector<cdouble>& column, std::vector<cdouble>& spectrum) {
    const int n = spec.height;
    Rng rng(substream_seed(spec.rng_seed, std::uint64_t(rg)));
    for (int az = 0; az < n; ++az) {
        const double sigma = reflectivity.at(az, rg);
        const double re = rng.normal();
        const double im = rng.normal();
        column[std::size_t(az)] = std::sqrt(0.5 * sigma) * cdouble(re, im);
    }
    for (const auto& t : targets) column[std::size_t(t.az)] += t.amplitude * filter.impulse_scale;
    fft.forward(column, spectrum);
    for (int k = 0; k < n; ++k) spectrum[std::size_t(k)] *= filter.response[std::size_t(k)];
    fft.inverse(spectrum, column);
}

}  // namespace sarsub::detail

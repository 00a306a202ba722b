#pragma once

#include <cmath>
#include <vector>

#include "sarsub/error.hpp"
#include "sarsub/metrics.hpp"

namespace sarsub::detail {

inline std::vector<double> gaussian_kernel(int size, double sigma) {
    const int r = size / 2;
    std::vector<double> g(static_cast<std::size_t>(size));
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = double(i - r);
        g[std::size_t(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += g[std::size_t(i)];
    }
    for (auto& v : g) v /= sum;
    return g;
}

inline void check_ssim_inputs(const Plane& pred, const Plane& ref, const SsimParams& p,
                              std::span<const std::uint8_t> mask) {
    require(pred.same_grid(ref), "ssim needs rasters on the same grid");
    require(p.window >= 3 && p.window % 2 == 1 && p.sigma > 0 && p.data_range > 0, "invalid SSIM parameters");
    if (pred.height < p.window || pred.width < p.window)
        fail(ErrorKind::validation, "raster smaller than the SSIM window");
    require(mask.empty() || mask.size() == pred.size(), "mask size mismatch");
}

inline double ssim_from_moments(double mx, double my, double sxx, double syy, double sxy, double c1, double c2) {
    return ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
}

// Sample standard deviation and interquartile range.
double sample_sd(std::span<const double> s);
double iqr(std::span<const double> s);

}  // namespace sarsub::detail

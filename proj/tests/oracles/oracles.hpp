#pragma once

// Independent scalar implementations used as test oracles. Nothing here calls
// into the library's numerical code.

#include <complex>
#include <cstdint>
#include <vector>

#include "sarsub/raster.hpp"

namespace oracle {

using cd = std::complex<double>;

// Direct O(n^2) DFT; forward is unscaled, inverse is scaled by 1/n.
std::vector<cd> dft(const std::vector<cd>& x);
std::vector<cd> idft(const std::vector<cd>& X);

// Band-limited interpolation of x by `factor` (zero-padding in the DFT domain).
std::vector<cd> oversample(const std::vector<cd>& x, int factor);

// -3 dB width (in input samples) of |x|^2 around its global maximum, measured on
// a `factor`-times oversampled profile with linear interpolation of the crossings.
double width_3db(const std::vector<cd>& x, int factor = 16);

// Linear-interpolation percentile on the sorted samples: rank p/100 * (n - 1).
double sort_percentile(std::vector<double> v, double p);
// Nearest-rank percentile: the ceil(p/100 n)-th smallest value.
double nearest_rank(std::vector<double> v, double p);

double mse(const std::vector<double>& a, const std::vector<double>& b);
double psnr(const std::vector<double>& a, const std::vector<double>& b);

// SSIM: 2-D Gaussian window evaluated directly, two-pass moments, valid positions only.
double ssim(const sarsub::Plane& a, const sarsub::Plane& b, int window = 11, double sigma = 1.5);

double enl(const std::vector<double>& samples);

// Gaussian KDE densities on `grid` points over [0, 1], Silverman bandwidth, unit
// grid mass; L1 distance times the grid step.
double kde_distance(const std::vector<double>& a, const std::vector<double>& b, int grid = 256);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Sample values from a fixed LCG (independent of the library's generator).
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : s_(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}
    double uniform();
    double normal();

private:
    std::uint64_t s_;
};

}  // namespace oracle

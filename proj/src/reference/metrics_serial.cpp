// Scalar reference metrics: direct 2-D window sums and sample-major KDE
// accumulation, independent of the separable / grid-major parallel kernels.

#include <cmath>
#include <limits>
#include <numbers>

#include "../detail/metric_common.hpp"

namespace sarsub::serial {

double psnr(const Plane& pred, const Plane& ref, std::span<const std::uint8_t> mask) {
    require(pred.same_grid(ref), "psnr needs rasters on the same grid");
    double sse = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!mask.empty() && mask[i]) continue;
        const double d = pred.data[i] - ref.data[i];
        sse += d * d;
        ++n;
    }
    if (n == 0) fail(ErrorKind::validation, "psnr over zero unmasked pixels");
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(double(n) / sse);
}

double ssim(const Plane& pred, const Plane& ref, const SsimParams& p, std::span<const std::uint8_t> mask) {
    detail::check_ssim_inputs(pred, ref, p, mask);
    const int win = p.window, r = win / 2;
    const auto g = detail::gaussian_kernel(win, p.sigma);
    const double c1 = (p.k1 * p.data_range) * (p.k1 * p.data_range);
    const double c2 = (p.k2 * p.data_range) * (p.k2 * p.data_range);
    double total = 0.0;
    std::size_t count = 0;
    for (int cy = r; cy < pred.height - r; ++cy)
        for (int cx = r; cx < pred.width - r; ++cx) {
            const std::size_t centre = std::size_t(cy) * std::size_t(pred.width) + std::size_t(cx);
            if (!mask.empty() && mask[centre]) continue;
            double wsum = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const std::size_t i = std::size_t(cy + dy) * std::size_t(pred.width) + std::size_t(cx + dx);
                    if (!mask.empty() && mask[i]) continue;
                    const double wt = g[std::size_t(dy + r)] * g[std::size_t(dx + r)];
                    const double a = pred.data[i], b = ref.data[i];
                    wsum += wt;
                    sx += wt * a;
                    sy += wt * b;
                    sxx += wt * a * a;
                    syy += wt * b * b;
                    sxy += wt * a * b;
                }
            if (wsum <= 0.0) continue;
            const double mx = sx / wsum, my = sy / wsum;
            total += detail::ssim_from_moments(mx, my, sxx / wsum - mx * mx, syy / wsum - my * my,
                                               sxy / wsum - mx * my, c1, c2);
            ++count;
        }
    if (count == 0) fail(ErrorKind::validation, "ssim has no unmasked window positions");
    return total / double(count);
}

double kde_distance(std::span<const double> pred, std::span<const double> ref, int grid_points) {
    require(pred.size() >= 100 && ref.size() >= 100, "kde_distance needs at least 100 samples per set");
    const double step = 1.0 / double(grid_points - 1);
    auto density = [&](std::span<const double> s) {
        const double h = silverman_bandwidth(s, grid_points);
        const double norm = 1.0 / (double(s.size()) * h * std::sqrt(2.0 * std::numbers::pi));
        std::vector<double> d(std::size_t(grid_points), 0.0);
        for (double v : s)
            for (int g = 0; g < grid_points; ++g) {
                const double z = (double(g) * step - v) / h;
                d[std::size_t(g)] += norm * std::exp(-0.5 * z * z);
            }
        double mass = 0.0;
        for (double x : d) mass += x * step;
        for (auto& x : d) x /= mass;
        return d;
    };
    const auto p = density(pred), q = density(ref);
    double l1 = 0.0;
    for (int g = 0; g < grid_points; ++g) l1 += std::abs(p[std::size_t(g)] - q[std::size_t(g)]) * step;
    return l1;
}

}  // namespace sarsub::serial

#include "sarsub/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "detail/metric_common.hpp"

namespace sarsub {

std::vector<Rect> RoiSet::for_scene(const std::string& scene_id) const {
    std::vector<Rect> out;
    for (const auto& r : rois)
        if (r.scene_id == scene_id) out.push_back(r.rect);
    return out;
}

void RoiSet::validate() const {
    for (std::size_t i = 0; i < rois.size(); ++i) {
        const auto& a = rois[i];
        if (a.rect.height < kMinSize || a.rect.width < kMinSize)
            fail(ErrorKind::validation, "ROI smaller than 32x32 in scene '" + a.scene_id + "'");
        for (std::size_t j = i + 1; j < rois.size(); ++j)
            if (rois[j].scene_id == a.scene_id && rois[j].rect.overlaps(a.rect))
                fail(ErrorKind::validation, "overlapping ROIs in scene '" + a.scene_id + "'");
    }
}

void RoiSet::validate_bounds(const std::string& scene_id, int height, int width) const {
    for (const auto& r : rois)
        if (r.scene_id == scene_id && !r.rect.inside(height, width))
            fail(ErrorKind::validation, "ROI outside bounds of scene '" + scene_id + "'");
}

void to_json(nlohmann::json& j, const RoiSet& r) {
    j = nlohmann::json{{"rois", nlohmann::json::array()}};
    for (const auto& roi : r.rois) {
        nlohmann::json e = roi.rect;
        e["scene_id"] = roi.scene_id;
        j["rois"].push_back(e);
    }
}

void from_json(const nlohmann::json& j, RoiSet& r) {
    r.rois.clear();
    for (const auto& e : j.at("rois")) r.rois.push_back({e.value("scene_id", std::string()), e.get<Rect>()});
}

double psnr(const Plane& pred, const Plane& ref, std::span<const std::uint8_t> mask) {
    require(pred.same_grid(ref), "psnr needs rasters on the same grid");
    require(mask.empty() || mask.size() == pred.size(), "mask size mismatch");
    const int h = pred.height, w = pred.width;
    std::vector<double> row_sse(std::size_t(h), 0.0);
    std::vector<std::size_t> row_count(std::size_t(h), 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double sse = 0.0;
        std::size_t count = 0;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = std::size_t(y) * std::size_t(w) + std::size_t(x);
            if (!mask.empty() && mask[i]) continue;
            const double d = pred.data[i] - ref.data[i];
            sse += d * d;
            ++count;
        }
        row_sse[std::size_t(y)] = sse;
        row_count[std::size_t(y)] = count;
    }
    const double sse = std::accumulate(row_sse.begin(), row_sse.end(), 0.0);
    const std::size_t count = std::accumulate(row_count.begin(), row_count.end(), std::size_t{0});
    if (count == 0) fail(ErrorKind::validation, "psnr over zero unmasked pixels");
    const double mse = sse / double(count);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double psnr(const IntensityRaster& pred, const IntensityRaster& ref) {
    pred.require_state(RadiometricState::normalized_unit, "psnr");
    ref.require_state(RadiometricState::normalized_unit, "psnr");
    const auto mask = mask_union(pred.nodata, ref.nodata);
    return psnr(pred.plane, ref.plane, mask);
}

double ssim(const Plane& pred, const Plane& ref, const SsimParams& p, std::span<const std::uint8_t> mask) {
    detail::check_ssim_inputs(pred, ref, p, mask);
    const int h = pred.height, w = pred.width, win = p.window, r = win / 2;
    const int ow = w - win + 1, oh = h - win + 1;
    const auto g = detail::gaussian_kernel(win, p.sigma);
    const double c1 = (p.k1 * p.data_range) * (p.k1 * p.data_range);
    const double c2 = (p.k2 * p.data_range) * (p.k2 * p.data_range);

    // Horizontal pass: six weighted moment planes of size h x ow.
    constexpr int kMoments = 6;
    std::vector<double> horiz(std::size_t(kMoments) * std::size_t(h) * std::size_t(ow));
    auto hidx = [&](int m, int y, int x) {
        return (std::size_t(m) * std::size_t(h) + std::size_t(y)) * std::size_t(ow) + std::size_t(x);
    };
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc[kMoments] = {};
            for (int k = 0; k < win; ++k) {
                const std::size_t i = std::size_t(y) * std::size_t(w) + std::size_t(x + k);
                const double m = (!mask.empty() && mask[i]) ? 0.0 : g[std::size_t(k)];
                const double a = pred.data[i], b = ref.data[i];
                acc[0] += m;
                acc[1] += m * a;
                acc[2] += m * b;
                acc[3] += m * a * a;
                acc[4] += m * b * b;
                acc[5] += m * a * b;
            }
            for (int m = 0; m < kMoments; ++m) horiz[hidx(m, y, x)] = acc[m];
        }
    }

    std::vector<double> row_sum(std::size_t(oh), 0.0);
    std::vector<std::size_t> row_count(std::size_t(oh), 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < oh; ++y) {
        double sum = 0.0;
        std::size_t count = 0;
        for (int x = 0; x < ow; ++x) {
            const std::size_t centre = std::size_t(y + r) * std::size_t(w) + std::size_t(x + r);
            if (!mask.empty() && mask[centre]) continue;
            double acc[kMoments] = {};
            for (int k = 0; k < win; ++k)
                for (int m = 0; m < kMoments; ++m) acc[m] += g[std::size_t(k)] * horiz[hidx(m, y + k, x)];
            if (acc[0] <= 0.0) continue;
            const double mx = acc[1] / acc[0], my = acc[2] / acc[0];
            const double sxx = acc[3] / acc[0] - mx * mx;
            const double syy = acc[4] / acc[0] - my * my;
            const double sxy = acc[5] / acc[0] - mx * my;
            sum += detail::ssim_from_moments(mx, my, sxx, syy, sxy, c1, c2);
            ++count;
        }
        row_sum[std::size_t(y)] = sum;
        row_count[std::size_t(y)] = count;
    }
    const double sum = std::accumulate(row_sum.begin(), row_sum.end(), 0.0);
    const std::size_t count = std::accumulate(row_count.begin(), row_count.end(), std::size_t{0});
    if (count == 0) fail(ErrorKind::validation, "ssim has no unmasked window positions");
    return sum / double(count);
}

double ssim(const IntensityRaster& pred, const IntensityRaster& ref, const SsimParams& params) {
    pred.require_state(RadiometricState::normalized_unit, "ssim");
    ref.require_state(RadiometricState::normalized_unit, "ssim");
    const auto mask = mask_union(pred.nodata, ref.nodata);
    return ssim(pred.plane, ref.plane, params, mask);
}

EnlResult enl(const Plane& linear, std::span<const Rect> rois, std::span<const std::uint8_t> mask) {
    require(!rois.empty(), "enl needs at least one ROI");
    require(mask.empty() || mask.size() == linear.size(), "mask size mismatch");
    EnlResult res;
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < rois.size(); ++k) {
        const Rect& r = rois[k];
        if (!r.inside(linear.height, linear.width)) fail(ErrorKind::validation, "ROI outside raster bounds");
        double sum = 0.0;
        std::size_t n = 0;
        for (int y = r.az; y < r.az + r.height; ++y)
            for (int x = r.rg; x < r.rg + r.width; ++x) {
                const std::size_t i = std::size_t(y) * std::size_t(linear.width) + std::size_t(x);
                if (!mask.empty() && mask[i]) continue;
                sum += linear.data[i];
                ++n;
            }
        double value = std::numeric_limits<double>::infinity();
        if (n > 1) {
            const double mean = sum / double(n);
            double ss = 0.0;
            for (int y = r.az; y < r.az + r.height; ++y)
                for (int x = r.rg; x < r.rg + r.width; ++x) {
                    const std::size_t i = std::size_t(y) * std::size_t(linear.width) + std::size_t(x);
                    if (!mask.empty() && mask[i]) continue;
                    const double d = linear.data[i] - mean;
                    ss += d * d;
                }
            const double var = ss / double(n);
            if (var > 0.0) value = mean * mean / var;
        }
        res.per_roi.push_back(value);
        if (std::isinf(value)) {
            ++res.excluded;
            res.warnings.push_back("ROI " + std::to_string(k) + " has zero variance; excluded from ENL average");
        } else {
            total += value;
            ++used;
        }
    }
    res.value = used ? total / double(used) : std::numeric_limits<double>::infinity();
    return res;
}

EnlResult enl(const IntensityRaster& linear, std::span<const Rect> rois) {
    linear.require_state(RadiometricState::linear_power, "enl");
    return enl(linear.plane, rois, linear.nodata);
}

namespace detail {

double sample_sd(std::span<const double> s) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    return s.size() > 1 ? std::sqrt(ss / double(s.size() - 1)) : 0.0;
}

double iqr(std::span<const double> s) {
    std::vector<double> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * double(v.size() - 1);
        const std::size_t i = std::size_t(pos);
        const double frac = pos - double(i);
        return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
    };
    return q(0.75) - q(0.25);
}

}  // namespace detail

double silverman_bandwidth(std::span<const double> samples, int grid_points) {
    require(!samples.empty() && grid_points >= 2, "bandwidth needs samples and grid points");
    const double sd = detail::sample_sd(samples);
    const double spread_iqr = detail::iqr(samples) / 1.34;
    double spread = std::min(sd, spread_iqr);
    if (!(spread > 0.0)) spread = std::max(sd, spread_iqr);
    const double h = 0.9 * spread * std::pow(double(samples.size()), -0.2);
    return std::max(h, 1.0 / double(grid_points));
}

namespace {

std::vector<double> grid_density(std::span<const double> s, int grid_points) {
    const double h = silverman_bandwidth(s, grid_points);
    const double step = 1.0 / double(grid_points - 1);
    std::vector<double> d(static_cast<std::size_t>(grid_points));
#pragma omp parallel for schedule(static)
    for (int g = 0; g < grid_points; ++g) {
        const double x = double(g) * step;
        double acc = 0.0;
        for (double v : s) {
            const double z = (x - v) / h;
            acc += std::exp(-0.5 * z * z);
        }
        d[std::size_t(g)] = acc;
    }
    const double mass = std::accumulate(d.begin(), d.end(), 0.0) * step;
    if (!(mass > 0.0)) fail(ErrorKind::numeric, "KDE has no mass on [0, 1]");
    for (auto& v : d) v /= mass;
    return d;
}

}  // namespace

double kde_distance(std::span<const double> pred, std::span<const double> ref, int grid_points) {
    require(pred.size() >= 100 && ref.size() >= 100, "kde_distance needs at least 100 samples per set");
    require(grid_points >= 2, "kde_distance needs at least 2 grid points");
    const auto p = grid_density(pred, grid_points);
    const auto q = grid_density(ref, grid_points);
    const double step = 1.0 / double(grid_points - 1);
    double sum = 0.0;
    for (int g = 0; g < grid_points; ++g) sum += std::abs(p[std::size_t(g)] - q[std::size_t(g)]);
    return sum * step;
}

std::vector<double> raster_samples(const IntensityRaster& r, std::size_t max_samples) {
    std::vector<double> all;
    all.reserve(r.valid_count());
    for (std::size_t i = 0; i < r.plane.size(); ++i)
        if (!r.masked(i)) all.push_back(r.plane.data[i]);
    if (max_samples == 0 || all.size() <= max_samples) return all;
    const std::size_t stride = (all.size() + max_samples - 1) / max_samples;
    std::vector<double> out;
    for (std::size_t i = 0; i < all.size(); i += stride) out.push_back(all[i]);
    return out;
}

}  // namespace sarsub

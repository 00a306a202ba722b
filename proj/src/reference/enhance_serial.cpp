// Serial references: direct window sums for the filters and a per-pixel
// gather formulation of the tiled blend.

#include <algorithm>
#include <cmath>

#include "../detail/tiling.hpp"
#include "sarsub/enhance.hpp"

namespace sarsub::serial {
namespace {

void window_stats(const Plane& in, int window, int y, int x, double& mean, double& var) {
    const int r = window / 2;
    double s = 0.0, s2 = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double v = in.at(detail::reflect_index(y + dy, in.height), detail::reflect_index(x + dx, in.width));
            s += v;
            s2 += v * v;
        }
    const double n = double(window * window);
    mean = s / n;
    var = std::max(0.0, s2 / n - mean * mean);
}

void check_window(const Plane& in, int window) {
    require(window >= 3 && window % 2 == 1, "filter window must be odd and >= 3");
    if (window > in.height || window > in.width) fail(ErrorKind::validation, "filter window larger than raster");
}

}  // namespace

Plane lee_filter(const Plane& in, int window, double noise_cv) {
    check_window(in, window);
    Plane out(in.height, in.width);
    const double cn2 = noise_cv * noise_cv;
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double m, v;
            window_stats(in, window, y, x, m, v);
            double k = 0.0;
            if (cn2 == 0.0)
                k = 1.0;
            else if (v > 0.0 && m != 0.0)
                k = std::max(0.0, 1.0 - cn2 / (v / (m * m)));
            out.at(y, x) = in.at(y, x) - (1.0 - k) * (in.at(y, x) - m);
        }
    return out;
}

Plane boxcar_filter(const Plane& in, int window) {
    check_window(in, window);
    Plane out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double m, v;
            window_stats(in, window, y, x, m, v);
            out.at(y, x) = m;
        }
    return out;
}

IntensityRaster enhance_tiled(std::span<const IntensityRaster> inputs, const EnhancerBinding& binding,
                              const TilingPlan& plan) {
    binding.validate();
    plan.validate();
    require(int(inputs.size()) == binding.input_count(), "enhancer arity mismatch");
    require(binding.kind != EnhancerKind::external, "serial reference runs built-in enhancers only");
    const int h = inputs[0].height(), w = inputs[0].width(), t = plan.tile_size;
    const auto ly = detail::tile_layout(h, plan), lx = detail::tile_layout(w, plan);
    const auto hann = detail::hann_weights(t);

    std::vector<std::vector<Plane>> outs(ly.origins.size());
    for (std::size_t r = 0; r < ly.origins.size(); ++r)
        for (int ox : lx.origins) {
            std::vector<Plane> tiles;
            for (const auto& in : inputs)
                tiles.push_back(detail::extract_tile(in.plane, ly, lx, ly.origins[r], ox, t));
            outs[r].push_back(apply_enhancer(binding, tiles, inputs[0].clip_bounds));
        }

    IntensityRaster result;
    result.plane = Plane(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int py = y + ly.pad_before, px = x + lx.pad_before;
            double num = 0.0, den = 0.0;
            for (std::size_t r = 0; r < ly.origins.size(); ++r) {
                const int ty = py - ly.origins[r];
                if (ty < 0 || ty >= t) continue;
                for (std::size_t c = 0; c < lx.origins.size(); ++c) {
                    const int tx = px - lx.origins[c];
                    if (tx < 0 || tx >= t) continue;
                    const double wt = hann[std::size_t(ty)] * hann[std::size_t(tx)];
                    num += wt * outs[r][c].at(ty, tx);
                    den += wt;
                }
            }
            result.plane.at(y, x) = num / den;
        }
    result.state = RadiometricState::normalized_unit;
    result.clip_bounds = inputs[0].clip_bounds;
    result.scene_id = inputs[0].scene_id;
    result.polarization = inputs[0].polarization;
    for (const auto& in : inputs) result.nodata = mask_union(result.nodata, in.nodata);
    return result;
}

}  // namespace sarsub::serial

#include <algorithm>
#include <cmath>

#include "sarsub/error.hpp"
#include "sarsub/preprocess.hpp"

namespace sarsub::serial {

PercentileHistogram build_histogram(std::span<const IntensityRaster* const> rasters, int bins) {
    require(bins >= 2, "histogram needs at least 2 bins");
    PercentileHistogram h;
    bool first = true;
    for (const auto* r : rasters) {
        r->require_state(RadiometricState::decibel, "fit_clip");
        for (std::size_t i = 0; i < r->plane.size(); ++i) {
            if (r->masked(i)) continue;
            const double v = r->plane.data[i];
            if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite value in clip dataset");
            if (first) {
                h.lo = h.hi = v;
                first = false;
            }
            h.lo = std::min(h.lo, v);
            h.hi = std::max(h.hi, v);
            ++h.total;
        }
    }
    if (h.total == 0) fail(ErrorKind::validation, "clip dataset has no unmasked pixels");
    h.counts.assign(std::size_t(bins), 0);
    const double scale = h.hi > h.lo ? double(bins) / (h.hi - h.lo) : 0.0;
    for (const auto* r : rasters)
        for (std::size_t i = 0; i < r->plane.size(); ++i) {
            if (r->masked(i)) continue;
            auto b = std::size_t((r->plane.data[i] - h.lo) * scale);
            if (b >= std::size_t(bins)) b = std::size_t(bins) - 1;
            ++h.counts[b];
        }
    return h;
}

}  // namespace sarsub::serial

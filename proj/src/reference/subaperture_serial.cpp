// Serial reference for the subaperture kernels. Works on a transposed copy of
// the raster (one contiguous vector per range column) with explicit index
// arithmetic; kept simple so the OpenMP path can be checked against it.

#include <algorithm>
#include <cmath>
#include <limits>

#include "sarsub/error.hpp"
#include "sarsub/fft.hpp"
#include "sarsub/subaperture.hpp"

namespace sarsub::serial {
namespace {

std::vector<std::vector<cdouble>> columns_of(const ComplexRaster& r) {
    std::vector<std::vector<cdouble>> cols(std::size_t(r.width), std::vector<cdouble>(std::size_t(r.height)));
    for (int az = 0; az < r.height; ++az)
        for (int rg = 0; rg < r.width; ++rg) cols[std::size_t(rg)][std::size_t(az)] = r.at(az, rg);
    return cols;
}

// Processed-band spectrum in FFT order after de-weighting; zero elsewhere.
std::vector<cdouble> deweighted(const std::vector<cdouble>& col, const SubapertureSpec& spec, const Fft1d& fft) {
    const int n = spec.azimuth_size;
    std::vector<cdouble> spec_fft(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    fft.forward(col, spec_fft);
    const int begin = spec.processed_begin();
    const int count = spec.processed_count();
    for (int i = 0; i < count; ++i) {
        const int k = ((begin + i) - n / 2 + n) % n;
        out[std::size_t(k)] = spec_fft[std::size_t(k)] / std::max(spec.deweight.at(i, count), spec.deweight_floor);
    }
    return out;
}

}  // namespace

SubapertureSet decompose(const ComplexRaster& slc, const SubapertureSpec& spec) {
    spec.validate();
    slc.validate();
    require(slc.height == spec.azimuth_size, "raster azimuth size does not match spec");
    const int n = slc.height;
    const Fft1d fft(n);
    const auto cols = columns_of(slc);

    SubapertureSet set;
    set.spec = spec;
    set.source_id = slc.scene_id;
    for (int k = 0; k < spec.num_looks; ++k) {
        ComplexRaster look(slc.height, slc.width, slc.params);
        look.scene_id = slc.scene_id;
        look.polarization = slc.polarization;
        set.looks.push_back(std::move(look));
    }
    std::vector<cdouble> band(static_cast<std::size_t>(n)), look(static_cast<std::size_t>(n));
    for (int rg = 0; rg < slc.width; ++rg) {
        const auto d = deweighted(cols[std::size_t(rg)], spec, fft);
        for (int k = 0; k < spec.num_looks; ++k) {
            std::fill(band.begin(), band.end(), cdouble{});
            const int offset = spec.recenter_offset(k);
            for (int s = spec.band_edges[std::size_t(k)]; s < spec.band_edges[std::size_t(k) + 1]; ++s) {
                const int from = (s - n / 2 + n) % n;
                const int to = (s - offset - n / 2 + 2 * n) % n;
                band[std::size_t(to)] = d[std::size_t(from)];
            }
            fft.inverse(band, look);
            const int shift = spec.look_shift(k);
            for (int az = 0; az < n; ++az) {
                const int src = ((az - shift) % n + n) % n;
                set.looks[std::size_t(k)].at(az, rg) = look[std::size_t(src)];
            }
        }
    }
    return set;
}

double recompose_check(const SubapertureSet& set, const ComplexRaster& slc) {
    const auto& spec = set.spec;
    spec.validate();
    slc.validate();
    require(slc.height == spec.azimuth_size, "raster azimuth size does not match spec");
    require(int(set.looks.size()) == spec.num_looks, "subaperture set has wrong number of looks");
    for (const auto& l : set.looks)
        if (!l.same_grid(slc)) fail(ErrorKind::validation, "look grid does not match source raster");
    const int n = slc.height;
    const Fft1d fft(n);
    const auto cols = columns_of(slc);
    std::vector<std::vector<std::vector<cdouble>>> look_cols;
    for (const auto& l : set.looks) look_cols.push_back(columns_of(l));

    double num = 0.0, den = 0.0;
    std::vector<cdouble> unshifted(static_cast<std::size_t>(n)), spectrum(static_cast<std::size_t>(n));
    for (int rg = 0; rg < slc.width; ++rg) {
        const auto d = deweighted(cols[std::size_t(rg)], spec, fft);
        std::vector<cdouble> sum(static_cast<std::size_t>(n));
        for (int k = 0; k < spec.num_looks; ++k) {
            const auto& lc = look_cols[std::size_t(k)][std::size_t(rg)];
            const int shift = spec.look_shift(k);
            for (int az = 0; az < n; ++az) unshifted[std::size_t(az)] = lc[std::size_t(((az + shift) % n + n) % n)];
            fft.forward(unshifted, spectrum);
            const int offset = spec.recenter_offset(k);
            for (int s = spec.band_edges[std::size_t(k)]; s < spec.band_edges[std::size_t(k) + 1]; ++s) {
                const int to = (s - n / 2 + n) % n;
                const int from = (s - offset - n / 2 + 2 * n) % n;
                sum[std::size_t(to)] += spectrum[std::size_t(from)];
            }
        }
        double col_num = 0.0, col_den = 0.0;
        for (int i = 0; i < n; ++i) {
            col_num += std::norm(sum[std::size_t(i)] - d[std::size_t(i)]);
            col_den += std::norm(d[std::size_t(i)]);
        }
        num += col_num;
        den += col_den;
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace sarsub::serial

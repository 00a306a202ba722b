#include "sarsub/subaperture.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "detail/subaperture_column.hpp"
#include "sarsub/error.hpp"

namespace sarsub {

int SubapertureSpec::recenter_offset(int k) const {
    const int m = band_size(k);
    return band_edges[std::size_t(k)] - (azimuth_size / 2 - m / 2);
}

int SubapertureSpec::look_shift(int k) const {
    return int(std::lround(double(recenter_offset(k)) * shift_per_bin));
}

void SubapertureSpec::validate() const {
    require(num_looks >= 2, "subaperture spec needs at least 2 looks");
    require(azimuth_size > 0, "subaperture spec azimuth size must be positive");
    require(band_edges.size() == std::size_t(num_looks) + 1, "band_edges must hold K+1 entries");
    require(alpha.size() == std::size_t(num_looks), "alpha must hold K entries");
    require(band_edges.front() >= 0 && band_edges.back() <= azimuth_size, "band edges outside azimuth grid");
    for (int k = 0; k < num_looks; ++k) {
        require(band_edges[std::size_t(k) + 1] > band_edges[std::size_t(k)], "band edges must be strictly increasing");
        require(band_size(k) >= 8, "each sub-band needs at least 8 bins");
    }
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    require(std::abs(total - 1.0) <= 1e-12, "alpha fractions must sum to 1");
    require(deweight_floor > 0, "de-weighting floor must be positive");
    require(std::isfinite(shift_per_bin), "shift_per_bin must be finite");
}

void to_json(nlohmann::json& j, const SubapertureSpec& s) {
    j = nlohmann::json{{"num_looks", s.num_looks},
                       {"azimuth_size", s.azimuth_size},
                       {"band_edges", s.band_edges},
                       {"alpha", s.alpha},
                       {"deweight_window", s.deweight},
                       {"deweight_floor", s.deweight_floor},
                       {"shift_per_bin", s.shift_per_bin}};
}

void from_json(const nlohmann::json& j, SubapertureSpec& s) {
    s.num_looks = j.at("num_looks").get<int>();
    s.azimuth_size = j.at("azimuth_size").get<int>();
    s.band_edges = j.at("band_edges").get<std::vector<int>>();
    s.alpha = j.at("alpha").get<std::vector<double>>();
    s.deweight = j.at("deweight_window").get<WindowSpec>();
    s.deweight_floor = j.value("deweight_floor", 1e-3);
    s.shift_per_bin = j.value("shift_per_bin", 0.0);
}

std::vector<int> partition_band(int begin, int count, int k) {
    require(k >= 1 && count >= k, "cannot partition band");
    const int base = count / k, extra = count % k;
    std::vector<int> edges(std::size_t(k) + 1);
    edges[0] = begin;
    for (int i = 0; i < k; ++i) edges[std::size_t(i) + 1] = edges[std::size_t(i)] + base + (i >= k - extra ? 1 : 0);
    return edges;
}

SubapertureSpec make_spec(const ComplexRaster& raster, int num_looks) {
    require(num_looks >= 2, "number of looks must be at least 2");
    raster.params.validate();
    const int n = raster.height;
    if (n < 8 * num_looks)
        fail(ErrorKind::validation, "azimuth size " + std::to_string(n) + " too small for " +
                                        std::to_string(num_looks) + " looks");
    const ProcessedBand band = processed_band(n, raster.params);
    if (band.count < 8 * num_looks)
        fail(ErrorKind::validation, "processed Doppler band of " + std::to_string(band.count) +
                                        " bins too narrow for " + std::to_string(num_looks) + " looks");

    SubapertureSpec spec;
    spec.num_looks = num_looks;
    spec.azimuth_size = n;
    spec.band_edges = partition_band(band.begin, band.count, num_looks);
    for (int k = 0; k < num_looks; ++k)
        spec.alpha.push_back(double(spec.band_size(k)) / double(band.count));
    if (raster.azimuth_weighting_applied)
        spec.deweight = {WindowType::hamming, raster.params.hamming_coefficient};
    else
        spec.deweight = {WindowType::none, 1.0};
    if (raster.params.residual_fm_rate != 0.0)
        spec.shift_per_bin =
            raster.params.azimuth_prf * raster.params.azimuth_prf / (double(n) * raster.params.residual_fm_rate);
    spec.validate();
    return spec;
}

namespace {

void check_inputs(const ComplexRaster& slc, const SubapertureSpec& spec) {
    spec.validate();
    slc.validate();
    if (slc.height != spec.azimuth_size)
        fail(ErrorKind::validation, "raster azimuth size " + std::to_string(slc.height) +
                                        " does not match spec azimuth size " + std::to_string(spec.azimuth_size));
}

ComplexRaster empty_look(const ComplexRaster& slc) {
    ComplexRaster look(slc.height, slc.width, slc.params);
    look.scene_id = slc.scene_id;
    look.polarization = slc.polarization;
    look.azimuth_weighting_applied = false;
    return look;
}

}  // namespace

SubapertureSet decompose(const ComplexRaster& slc, const SubapertureSpec& spec) {
    check_inputs(slc, spec);
    const int n = slc.height;
    const int looks = spec.num_looks;
    const auto gains = detail::deweight_gains(spec);
    const Fft1d fft(n);

    SubapertureSet set;
    set.spec = spec;
    set.source_id = slc.scene_id;
    for (int k = 0; k < looks; ++k) set.looks.push_back(empty_look(slc));

#pragma omp parallel
    {
        std::vector<cdouble> column(static_cast<std::size_t>(n)), scratch(static_cast<std::size_t>(n)), centered(static_cast<std::size_t>(n));
        std::vector<cdouble> band(static_cast<std::size_t>(n)), look(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
        for (int rg = 0; rg < slc.width; ++rg) {
            for (int az = 0; az < n; ++az) column[std::size_t(az)] = slc.at(az, rg);
            detail::deweighted_spectrum(column, spec, gains, fft, scratch, centered);
            for (int k = 0; k < looks; ++k) {
                std::fill(band.begin(), band.end(), cdouble{});
                const int offset = spec.recenter_offset(k);
                for (int s = spec.band_edges[std::size_t(k)]; s < spec.band_edges[std::size_t(k) + 1]; ++s)
                    band[std::size_t(fft_from_centered(s - offset, n))] = centered[std::size_t(s)];
                fft.inverse(band, look);
                detail::circular_shift(look, spec.look_shift(k), scratch);
                auto& out = set.looks[std::size_t(k)];
                for (int az = 0; az < n; ++az) out.at(az, rg) = look[std::size_t(az)];
            }
        }
    }
    return set;
}

double recompose_check(const SubapertureSet& set, const ComplexRaster& slc) {
    check_inputs(slc, set.spec);
    const auto& spec = set.spec;
    require(int(set.looks.size()) == spec.num_looks, "subaperture set has wrong number of looks");
    for (const auto& l : set.looks)
        if (!l.same_grid(slc)) fail(ErrorKind::validation, "look grid does not match source raster");

    const int n = slc.height;
    const auto gains = detail::deweight_gains(spec);
    const Fft1d fft(n);
    std::vector<double> residual_col(std::size_t(slc.width)), reference_col(std::size_t(slc.width));

#pragma omp parallel
    {
        std::vector<cdouble> column(static_cast<std::size_t>(n)), scratch(static_cast<std::size_t>(n)), centered(static_cast<std::size_t>(n));
        std::vector<cdouble> sum(static_cast<std::size_t>(n)), look(static_cast<std::size_t>(n)), spectrum(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
        for (int rg = 0; rg < slc.width; ++rg) {
            for (int az = 0; az < n; ++az) column[std::size_t(az)] = slc.at(az, rg);
            detail::deweighted_spectrum(column, spec, gains, fft, scratch, centered);
            std::fill(sum.begin(), sum.end(), cdouble{});
            for (int k = 0; k < spec.num_looks; ++k) {
                const auto& src = set.looks[std::size_t(k)];
                for (int az = 0; az < n; ++az) look[std::size_t(az)] = src.at(az, rg);
                detail::circular_shift(look, -spec.look_shift(k), scratch);
                fft.forward(look, spectrum);
                const int offset = spec.recenter_offset(k);
                for (int s = spec.band_edges[std::size_t(k)]; s < spec.band_edges[std::size_t(k) + 1]; ++s)
                    sum[std::size_t(s)] += spectrum[std::size_t(fft_from_centered(s - offset, n))];
            }
            double num = 0.0, den = 0.0;
            for (int s = 0; s < n; ++s) {
                num += std::norm(sum[std::size_t(s)] - centered[std::size_t(s)]);
                den += std::norm(centered[std::size_t(s)]);
            }
            residual_col[std::size_t(rg)] = num;
            reference_col[std::size_t(rg)] = den;
        }
    }
    const double num = std::accumulate(residual_col.begin(), residual_col.end(), 0.0);
    const double den = std::accumulate(reference_col.begin(), reference_col.end(), 0.0);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace sarsub

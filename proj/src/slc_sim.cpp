#include "sarsub/slc_sim.hpp"

#include <cmath>

#include "detail/sim_column.hpp"
#include "sarsub/error.hpp"

namespace sarsub {

void SceneSpec::validate() const {
    require(height > 0 && width > 0, "scene dimensions must be positive");
    require(background_reflectivity >= 0 && std::isfinite(background_reflectivity),
            "background reflectivity must be finite and >= 0");
    for (const auto& t : point_targets) {
        if (t.az < 0 || t.az >= height || t.rg < 0 || t.rg >= width)
            fail(ErrorKind::validation, "point target (" + std::to_string(t.az) + ", " + std::to_string(t.rg) +
                                            ") outside scene bounds");
        require(t.amplitude >= 0 && std::isfinite(t.amplitude), "point target amplitude must be finite and >= 0");
    }
    for (const auto& r : homogeneous_regions) {
        require(r.rect.inside(height, width), "homogeneous region outside scene bounds or degenerate");
        require(r.reflectivity >= 0 && std::isfinite(r.reflectivity), "region reflectivity must be finite and >= 0");
    }
}

void to_json(nlohmann::json& j, const SceneSpec& s) {
    auto targets = nlohmann::json::array();
    for (const auto& t : s.point_targets) targets.push_back({{"az", t.az}, {"rg", t.rg}, {"amplitude", t.amplitude}});
    auto regions = nlohmann::json::array();
    for (const auto& r : s.homogeneous_regions) {
        nlohmann::json rj = r.rect;
        rj["reflectivity"] = r.reflectivity;
        regions.push_back(rj);
    }
    j = nlohmann::json{{"height_az", s.height},
                       {"width_rg", s.width},
                       {"background_reflectivity", s.background_reflectivity},
                       {"point_targets", targets},
                       {"homogeneous_regions", regions},
                       {"rng_seed", s.rng_seed}};
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
    s = SceneSpec{};
    s.height = j.at("height_az").get<int>();
    s.width = j.at("width_rg").get<int>();
    s.background_reflectivity = j.value("background_reflectivity", 1.0);
    s.rng_seed = j.value("rng_seed", std::uint64_t{0});
    for (const auto& t : j.value("point_targets", nlohmann::json::array()))
        s.point_targets.push_back({t.at("az").get<int>(), t.at("rg").get<int>(), t.value("amplitude", 1.0)});
    for (const auto& r : j.value("homogeneous_regions", nlohmann::json::array()))
        s.homogeneous_regions.push_back({r.get<Rect>(), r.value("reflectivity", 1.0)});
}

Plane reflectivity_map(const SceneSpec& spec) {
    Plane p(spec.height, spec.width, spec.background_reflectivity);
    for (const auto& r : spec.homogeneous_regions)
        for (int y = r.rect.az; y < r.rect.az + r.rect.height; ++y)
            for (int x = r.rect.rg; x < r.rect.rg + r.rect.width; ++x) p.at(y, x) = r.reflectivity;
    return p;
}

namespace {

IntensityRaster clean_raster(const SceneSpec& spec, const Plane& refl) {
    IntensityRaster clean;
    clean.plane = refl;
    for (const auto& t : spec.point_targets) clean.plane.at(t.az, t.rg) += t.amplitude * t.amplitude;
    clean.state = RadiometricState::linear_power;
    return clean;
}

}  // namespace

SimulatedScene simulate_slc(const SceneSpec& spec, const RadarParams& params) {
    spec.validate();
    params.validate();
    const int n = spec.height;
    const Plane refl = reflectivity_map(spec);
    const auto filter = detail::make_shaping_filter(n, params);
    const auto targets = detail::targets_by_column(spec);
    const Fft1d fft(n);

    SimulatedScene out;
    out.slc = ComplexRaster(spec.height, spec.width, params);
    out.slc.azimuth_weighting_applied = params.hamming_coefficient < 1.0;

#pragma omp parallel
    {
        std::vector<cdouble> column(static_cast<std::size_t>(n)), spectrum(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
        for (int rg = 0; rg < spec.width; ++rg) {
            detail::simulate_column(rg, spec, refl, targets[std::size_t(rg)], filter, fft, column, spectrum);
            for (int az = 0; az < n; ++az) out.slc.at(az, rg) = column[std::size_t(az)];
        }
    }
    out.clean_reflectivity = clean_raster(spec, refl);
    return out;
}

namespace serial {

SimulatedScene simulate_slc(const SceneSpec& spec, const RadarParams& params) {
    spec.validate();
    params.validate();
    const int n = spec.height;
    const Plane refl = reflectivity_map(spec);
    const auto filter = detail::make_shaping_filter(n, params);
    const auto targets = detail::targets_by_column(spec);
    const Fft1d fft(n);

    SimulatedScene out;
    out.slc = ComplexRaster(spec.height, spec.width, params);
    out.slc.azimuth_weighting_applied = params.hamming_coefficient < 1.0;
    std::vector<cdouble> column(static_cast<std::size_t>(n)), spectrum(static_cast<std::size_t>(n));
    for (int rg = 0; rg < spec.width; ++rg) {
        detail::simulate_column(rg, spec, refl, targets[std::size_t(rg)], filter, fft, column, spectrum);
        for (int az = 0; az < n; ++az) out.slc.at(az, rg) = column[std::size_t(az)];
    }
    out.clean_reflectivity = clean_raster(spec, refl);
    return out;
}

}  // namespace serial

ResolutionSummary resolution_summary(const RadarParams& params, const SubapertureSpec& spec) {
    params.validate();
    spec.validate();
    ResolutionSummary r;
    r.range_resolution = params.speed_of_light / (2.0 * params.transmitted_bandwidth);
    r.azimuth_resolution = params.antenna_length / 2.0;
    r.doppler_bandwidth = params.doppler_bandwidth();
    for (int k = 0; k < spec.num_looks; ++k) {
        const double alpha = spec.alpha[std::size_t(k)];
        r.looks.push_back({k, alpha, r.azimuth_resolution / alpha});
    }
    return r;
}

void to_json(nlohmann::json& j, const ResolutionSummary& r) {
    auto looks = nlohmann::json::array();
    for (const auto& l : r.looks)
        looks.push_back({{"look", l.look}, {"alpha", l.alpha}, {"azimuth_resolution_m", l.azimuth_resolution}});
    j = nlohmann::json{{"range_resolution_m", r.range_resolution},
                       {"azimuth_resolution_m", r.azimuth_resolution},
                       {"doppler_bandwidth_hz", r.doppler_bandwidth},
                       {"looks", looks}};
}

}  // namespace sarsub

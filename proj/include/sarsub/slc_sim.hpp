#pragma once

#include <cstdint>
#include <vector>

#include "sarsub/raster.hpp"
#include "sarsub/subaperture.hpp"

namespace sarsub {

struct PointTarget {
    int az = 0;
    int rg = 0;
    double amplitude = 1.0;  // linear
};

struct HomogeneousRegion {
    Rect rect;
    double reflectivity = 1.0;  // linear power
};

struct SceneSpec {
    int height = 512;  // azimuth
    int width = 512;   // range
    double background_reflectivity = 1.0;
    std::vector<PointTarget> point_targets;
    std::vector<HomogeneousRegion> homogeneous_regions;  // later regions paint over earlier ones
    std::uint64_t rng_seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);

struct SimulatedScene {
    ComplexRaster slc;
    IntensityRaster clean_reflectivity;  // linear_power
};

// Fully developed speckle over the declared reflectivity map, azimuth band-limited
// to B_D and weighted by the generalized Hamming window. The shaping filter is
// energy-normalized, so expected intensity equals reflectivity inside homogeneous
// areas; point targets are scaled so their focused peak intensity is amplitude^2.
SimulatedScene simulate_slc(const SceneSpec& spec, const RadarParams& params);

// Reflectivity map (without point targets) of a scene.
Plane reflectivity_map(const SceneSpec& spec);

struct LookResolution {
    int look = 0;
    double alpha = 0.0;
    double azimuth_resolution = 0.0;  // m
};

struct ResolutionSummary {
    double range_resolution = 0.0;    // c / 2B
    double azimuth_resolution = 0.0;  // L / 2
    double doppler_bandwidth = 0.0;   // 2v / L
    std::vector<LookResolution> looks;
};

ResolutionSummary resolution_summary(const RadarParams& params, const SubapertureSpec& spec);

void to_json(nlohmann::json& j, const ResolutionSummary& r);

namespace serial {
SimulatedScene simulate_slc(const SceneSpec& spec, const RadarParams& params);
}

}  // namespace sarsub

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sarsub/error.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/slc_sim.hpp"
#include "sarsub/subaperture.hpp"
#include "oracles.hpp"

using namespace sarsub;

namespace {

RadarParams unweighted() {
    RadarParams p;
    p.hamming_coefficient = 1.0;
    return p;
}

std::vector<oracle::cd> azimuth_profile(const ComplexRaster& r, int rg) {
    std::vector<oracle::cd> col(static_cast<std::size_t>(r.height));
    for (int az = 0; az < r.height; ++az) col[std::size_t(az)] = r.at(az, rg);
    return col;
}

}  // namespace

TEST(SlcSim, SinglePointTargetPeaksAtTargetWithSquaredAmplitude) {
    SceneSpec spec;
    spec.height = 256;
    spec.width = 16;
    spec.background_reflectivity = 0.0;
    spec.point_targets = {{100, 5, 3.0}};
    const auto sim = simulate_slc(spec, RadarParams{});
    const auto profile = azimuth_profile(sim.slc, 5);
    int arg = 0;
    for (int az = 0; az < spec.height; ++az)
        if (std::norm(profile[std::size_t(az)]) > std::norm(profile[std::size_t(arg)])) arg = az;
    EXPECT_EQ(arg, 100);
    EXPECT_NEAR(std::norm(profile[100]), 9.0, 1e-9);
    // Other columns stay empty.
    for (int az = 0; az < spec.height; ++az) EXPECT_EQ(sim.slc.at(az, 4), cdouble{});
    EXPECT_DOUBLE_EQ(sim.clean_reflectivity.plane.at(100, 5), 9.0);
}

TEST(SlcSim, ImpulseResponseIsWindowedSinc) {
    // Oracle: inverse DFT of the band-limited, windowed spectrum of a unit impulse.
    SceneSpec spec;
    spec.height = 128;
    spec.width = 1;
    spec.background_reflectivity = 0.0;
    spec.point_targets = {{40, 0, 1.0}};
    RadarParams params;
    const auto sim = simulate_slc(spec, params);

    const int n = spec.height;
    const double frac = params.doppler_bandwidth() / params.azimuth_prf;
    const int m = int(std::floor(n * frac + 1e-9));
    const int begin = n / 2 - m / 2;
    std::vector<oracle::cd> spectrum(static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double u = (i + 0.5) / m;
        const double w = params.hamming_coefficient - (1 - params.hamming_coefficient) * std::cos(2 * std::numbers::pi * u);
        const int f = begin + i - n / 2;  // Doppler bin
        const double ang = -2 * std::numbers::pi * f * 40.0 / n;
        spectrum[std::size_t((f + n) % n)] = w * oracle::cd(std::cos(ang), std::sin(ang));
        wsum += w;
    }
    auto expected = oracle::idft(spectrum);
    for (auto& v : expected) v *= double(n) / wsum;  // unit peak
    for (int az = 0; az < n; ++az)
        EXPECT_NEAR(std::norm(sim.slc.at(az, 0)), std::norm(expected[std::size_t(az)]), 1e-10) << az;
}

TEST(SlcSim, HomogeneousSpeckleMeanIsReflectivity) {
    SceneSpec spec;
    spec.height = 512;
    spec.width = 512;
    spec.background_reflectivity = 1.0;
    spec.rng_seed = 11;
    RadarParams p;
    p.hamming_coefficient = 1.0;
    p.azimuth_prf = p.doppler_bandwidth();  // no band limit, no window
    const auto sim = simulate_slc(spec, p);
    double sum = 0.0, sum2 = 0.0;
    const double n = double(sim.slc.data.size());
    for (const auto& z : sim.slc.data) {
        sum += std::norm(z);
        sum2 += std::norm(z) * std::norm(z);
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    EXPECT_NEAR(mean, 1.0, 0.01);
    EXPECT_NEAR(mean * mean / var, 1.0, 0.05);
}

TEST(SlcSim, ShapedSpeckleKeepsMeanAndSingleLookStatistics) {
    SceneSpec spec;
    spec.height = 512;
    spec.width = 256;
    spec.background_reflectivity = 2.0;
    spec.rng_seed = 5;
    const auto sim = simulate_slc(spec, RadarParams{});
    std::vector<double> v;
    for (const auto& z : sim.slc.data) v.push_back(std::norm(z));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    EXPECT_NEAR(mean, 2.0, 0.02 * 2.0);
    EXPECT_NEAR(oracle::enl(v), 1.0, 0.05);
}

TEST(SlcSim, DeterministicAndMatchesSerialReference) {
    SceneSpec spec;
    spec.height = 96;
    spec.width = 40;
    spec.rng_seed = 99;
    spec.point_targets = {{10, 3, 5.0}};
    spec.homogeneous_regions = {{{20, 5, 30, 20}, 4.0}};
    RadarParams p;
    p.residual_fm_rate = -2000.0;
    const auto a = simulate_slc(spec, p);
    const auto b = simulate_slc(spec, p);
    const auto c = serial::simulate_slc(spec, p);
    EXPECT_EQ(a.slc.data, b.slc.data);
    EXPECT_EQ(a.slc.data, c.slc.data);
    spec.rng_seed = 100;
    EXPECT_NE(simulate_slc(spec, p).slc.data, a.slc.data);
}

TEST(SlcSim, ReflectivityMapLaterRegionsWin) {
    SceneSpec spec;
    spec.height = 10;
    spec.width = 10;
    spec.background_reflectivity = 1.0;
    spec.homogeneous_regions = {{{0, 0, 5, 5}, 2.0}, {{3, 3, 5, 5}, 7.0}};
    const auto m = reflectivity_map(spec);
    EXPECT_EQ(m.at(0, 0), 2.0);
    EXPECT_EQ(m.at(4, 4), 7.0);
    EXPECT_EQ(m.at(9, 9), 1.0);
}

TEST(SlcSim, Errors) {
    SceneSpec spec;
    spec.height = 64;
    spec.width = 64;
    RadarParams p;
    p.azimuth_prf = p.doppler_bandwidth() * 0.8;
    EXPECT_THROW(simulate_slc(spec, p), Error);
    spec.point_targets = {{64, 0, 1.0}};
    EXPECT_THROW(simulate_slc(spec, RadarParams{}), Error);
    spec.point_targets = {{0, 0, -1.0}};
    EXPECT_THROW(simulate_slc(spec, RadarParams{}), Error);
    spec.point_targets.clear();
    spec.homogeneous_regions = {{{0, 0, 0, 4}, 1.0}};
    EXPECT_THROW(simulate_slc(spec, RadarParams{}), Error);
    spec.homogeneous_regions = {{{60, 0, 8, 4}, 1.0}};
    EXPECT_THROW(simulate_slc(spec, RadarParams{}), Error);
}

TEST(SlcSim, SceneJsonRoundTrip) {
    SceneSpec spec;
    spec.height = 32;
    spec.width = 48;
    spec.background_reflectivity = 0.5;
    spec.point_targets = {{1, 2, 3.0}};
    spec.homogeneous_regions = {{{4, 5, 6, 7}, 8.0}};
    spec.rng_seed = 1234567890123ULL;
    const nlohmann::json j = spec;
    const auto back = j.get<SceneSpec>();
    EXPECT_EQ(nlohmann::json(back), j);
    EXPECT_EQ(j.at("height_az"), 32);
    EXPECT_EQ(j.at("width_rg"), 48);
}

TEST(ResolutionSummary, DirectSubstitution) {
    RadarParams p;
    p.speed_of_light = 3.0e8;
    p.transmitted_bandwidth = 3.0e7;
    p.antenna_length = 10.0;
    p.platform_velocity = 5000.0;  // B_D = 1000 Hz
    p.azimuth_prf = 1200.0;
    ComplexRaster slc(720, 4, p);  // 600 processed bins, 200 per look
    const auto spec = make_spec(slc, 3);
    const auto r = resolution_summary(p, spec);
    EXPECT_DOUBLE_EQ(r.range_resolution, 5.0);
    EXPECT_DOUBLE_EQ(r.azimuth_resolution, 5.0);
    ASSERT_EQ(r.looks.size(), 3u);
    for (const auto& l : r.looks) {
        EXPECT_NEAR(l.alpha, 1.0 / 3.0, 1e-12);
        EXPECT_NEAR(l.azimuth_resolution, 3.0 * r.azimuth_resolution, 1e-9);
    }
}

TEST(SlcSim, ResolutionScalesInverselyWithBandFraction) {
    // Restricting the Doppler band to fraction alpha widens the impulse response by 1/alpha.
    SceneSpec spec;
    spec.height = 512;
    spec.width = 1;
    spec.background_reflectivity = 0.0;
    spec.point_targets = {{256, 0, 1.0}};
    RadarParams wide = unweighted();
    wide.azimuth_prf = wide.doppler_bandwidth() * 1.25;
    RadarParams narrow = wide;
    narrow.azimuth_prf = wide.azimuth_prf * 2.0;  // half the fraction of the PRF window
    const double w_wide = oracle::width_3db(azimuth_profile(simulate_slc(spec, wide).slc, 0));
    const double w_narrow = oracle::width_3db(azimuth_profile(simulate_slc(spec, narrow).slc, 0));
    EXPECT_NEAR(w_narrow / w_wide, 2.0, 0.2);
}

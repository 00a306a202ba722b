#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sarsub/doppler.hpp"
#include "sarsub/error.hpp"
#include "sarsub/slc_sim.hpp"
#include "sarsub/subaperture.hpp"
#include "oracles.hpp"

using namespace sarsub;

namespace {

RadarParams params_for(double bd_over_prf, double hamming = 0.75) {
    RadarParams p;
    p.platform_velocity = 4500.0;
    p.antenna_length = 10.0;  // B_D = 900 Hz
    p.azimuth_prf = 900.0 / bd_over_prf;
    p.hamming_coefficient = hamming;
    return p;
}

ComplexRaster random_raster(int h, int w, const RadarParams& p, std::uint64_t seed) {
    ComplexRaster r(h, w, p);
    r.azimuth_weighting_applied = p.hamming_coefficient < 1.0;
    oracle::Lcg rng(seed);
    for (auto& v : r.data) v = {rng.normal(), rng.normal()};
    return r;
}

std::vector<oracle::cd> column(const ComplexRaster& r, int rg) {
    std::vector<oracle::cd> c(static_cast<std::size_t>(r.height));
    for (int az = 0; az < r.height; ++az) c[std::size_t(az)] = r.at(az, rg);
    return c;
}

double rel_diff(const ComplexRaster& a, const ComplexRaster& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace

TEST(PartitionBand, ExhaustiveTilingAndBalance) {
    for (int k = 2; k <= 5; ++k)
        for (int count = 8 * k; count <= 1024; ++count) {
            const auto e = partition_band(17, count, k);
            ASSERT_EQ(e.size(), std::size_t(k) + 1);
            ASSERT_EQ(e.front(), 17);
            ASSERT_EQ(e.back(), 17 + count);
            int lo = count, hi = 0;
            for (int i = 0; i < k; ++i) {
                const int sz = e[std::size_t(i) + 1] - e[std::size_t(i)];
                ASSERT_GT(sz, 0);
                lo = std::min(lo, sz);
                hi = std::max(hi, sz);
                if (i > 0) { ASSERT_GE(sz, e[std::size_t(i)] - e[std::size_t(i) - 1]); }  // extras at the top
            }
            ASSERT_LE(hi - lo, 1) << "count " << count << " k " << k;
        }
}

TEST(MakeSpec, EvenAndUnevenDivision) {
    const ComplexRaster even(1024, 2, params_for(900.0 / 1024.0));
    const auto s = make_spec(even, 3);
    EXPECT_EQ(s.processed_count(), 900);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(s.band_size(k), 300);
        EXPECT_DOUBLE_EQ(s.alpha[std::size_t(k)], 1.0 / 3.0);
    }

    const ComplexRaster uneven(1024, 2, params_for(901.0 / 1024.0));
    const auto u = make_spec(uneven, 3);
    EXPECT_EQ(u.processed_count(), 901);
    EXPECT_EQ(u.band_size(0), 300);
    EXPECT_EQ(u.band_size(1), 300);
    EXPECT_EQ(u.band_size(2), 301);
    double sum = 0;
    for (double a : u.alpha) sum += a;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(MakeSpec, ThreeLookDefaultIsNonOverlappingAndContiguous) {
    const ComplexRaster r(512, 4, RadarParams{});
    const auto s = make_spec(r, 3);
    ASSERT_EQ(s.band_edges.size(), 4u);
    for (int k = 0; k < 3; ++k) EXPECT_LT(s.band_edges[std::size_t(k)], s.band_edges[std::size_t(k) + 1]);
    const auto band = processed_band(512, r.params);
    EXPECT_EQ(s.band_edges.front(), band.begin);
    EXPECT_EQ(s.band_edges.back(), band.end());
}

TEST(MakeSpec, Errors) {
    EXPECT_THROW(make_spec(ComplexRaster(20, 4, RadarParams{}), 3), Error);
    EXPECT_THROW(make_spec(ComplexRaster(512, 4, RadarParams{}), 1), Error);
    EXPECT_THROW(make_spec(ComplexRaster(512, 4, params_for(1.2)), 3), Error);
    EXPECT_THROW(make_spec(ComplexRaster(64, 4, params_for(0.2)), 3), Error);  // 12 processed bins
}

TEST(SubapertureSpec, ValidationAndJson) {
    const auto s = make_spec(ComplexRaster(256, 1, RadarParams{}), 4);
    EXPECT_NO_THROW(s.validate());
    const nlohmann::json j = s;
    const auto back = j.get<SubapertureSpec>();
    EXPECT_EQ(nlohmann::json(back), j);
    auto bad = s;
    bad.alpha[0] += 1e-9;
    EXPECT_THROW(bad.validate(), Error);
    bad = s;
    std::swap(bad.band_edges[1], bad.band_edges[2]);
    EXPECT_THROW(bad.validate(), Error);
    bad = s;
    bad.band_edges[1] = bad.band_edges[0] + 7;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Decompose, SameGridForEveryK) {
    const auto slc = random_raster(128, 9, RadarParams{}, 1);
    for (int k = 2; k <= 4; ++k) {
        const auto set = decompose(slc, make_spec(slc, k));
        ASSERT_EQ(set.looks.size(), std::size_t(k));
        for (const auto& l : set.looks) {
            EXPECT_EQ(l.height, slc.height);
            EXPECT_EQ(l.width, slc.width);
        }
    }
}

TEST(Decompose, ConstantAzimuthSignalLandsInTheDcLook) {
    auto slc = ComplexRaster(240, 3, params_for(0.75));
    for (auto& v : slc.data) v = {2.0, -1.0};
    slc.azimuth_weighting_applied = true;
    const auto spec = make_spec(slc, 3);
    const auto set = decompose(slc, spec);
    double scale_re = set.looks[1].data[0].real() / 2.0;
    EXPECT_GT(scale_re, 0.0);
    double peak = 0.0;
    for (const auto& l : set.looks) peak = std::max(peak, std::abs(l.data[0]));
    for (std::size_t i = 0; i < slc.data.size(); ++i) {
        EXPECT_LT(std::abs(set.looks[1].data[i] - scale_re * slc.data[i]), 1e-10 * peak);
        EXPECT_LE(std::abs(set.looks[0].data[i]), 1e-10 * peak);
        EXPECT_LE(std::abs(set.looks[2].data[i]), 1e-10 * peak);
    }
}

TEST(Decompose, BandSpectraMatchDirectDftOracle) {
    // Each look's spectrum, moved back to its band, reassembles the de-weighted spectrum.
    auto p = params_for(0.8, 0.6);
    const auto slc = random_raster(60, 3, p, 2);
    const auto spec = make_spec(slc, 3);
    const auto set = decompose(slc, spec);
    const int n = slc.height, m = spec.processed_count(), begin = spec.processed_begin();
    for (int rg = 0; rg < slc.width; ++rg) {
        const auto X = oracle::dft(column(slc, rg));
        std::vector<oracle::cd> expected(static_cast<std::size_t>(n)), assembled(static_cast<std::size_t>(n));
        for (int i = 0; i < m; ++i) {
            const double u = (i + 0.5) / m;
            const double w = std::max(0.6 - 0.4 * std::cos(2 * std::numbers::pi * u), 1e-3);
            const int f = begin + i - n / 2;
            expected[std::size_t(begin + i)] = X[std::size_t((f + n) % n)] / w;
        }
        for (int k = 0; k < 3; ++k) {
            const auto L = oracle::dft(column(set.looks[std::size_t(k)], rg));
            const int off = spec.recenter_offset(k);
            for (int s = spec.band_edges[std::size_t(k)]; s < spec.band_edges[std::size_t(k) + 1]; ++s) {
                const int f = s - off - n / 2;
                assembled[std::size_t(s)] += L[std::size_t((f + n) % n)];
            }
        }
        double num = 0, den = 0;
        for (int s = 0; s < n; ++s) {
            num += std::norm(assembled[std::size_t(s)] - expected[std::size_t(s)]);
            den += std::norm(expected[std::size_t(s)]);
        }
        EXPECT_LE(std::sqrt(num / den), 1e-10);
    }
}

TEST(Decompose, Linearity) {
    const auto p = RadarParams{};
    const auto a = random_raster(128, 6, p, 3), b = random_raster(128, 6, p, 4);
    const cdouble ca{1.5, -0.25}, cb{-0.7, 2.0};
    ComplexRaster mix = a;
    for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = ca * a.data[i] + cb * b.data[i];
    const auto spec = make_spec(a, 3);
    const auto sa = decompose(a, spec), sb = decompose(b, spec), sm = decompose(mix, spec);
    for (int k = 0; k < 3; ++k) {
        ComplexRaster expect = sa.looks[std::size_t(k)];
        for (std::size_t i = 0; i < expect.data.size(); ++i)
            expect.data[i] = ca * sa.looks[std::size_t(k)].data[i] + cb * sb.looks[std::size_t(k)].data[i];
        EXPECT_LE(rel_diff(sm.looks[std::size_t(k)], expect), 1e-12);
    }
}

TEST(Decompose, EnergyPartitionOnFlatSpectrum) {
    // An azimuth impulse has a flat spectrum; without de-weighting each look carries alpha_k of the energy.
    for (int k : {2, 3, 4}) {
        ComplexRaster slc(500, 2, params_for(0.9, 1.0));
        slc.at(0, 0) = 1.0;
        slc.at(0, 1) = {0.0, 3.0};
        const auto spec = make_spec(slc, k);
        ASSERT_EQ(spec.deweight.type, WindowType::none);
        const auto set = decompose(slc, spec);
        double total = 0.0;
        std::vector<double> e(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            for (const auto& v : set.looks[std::size_t(i)].data) e[std::size_t(i)] += std::norm(v);
            total += e[std::size_t(i)];
        }
        for (int i = 0; i < k; ++i) EXPECT_NEAR(e[std::size_t(i)] / total, spec.alpha[std::size_t(i)], 1e-6 * spec.alpha[std::size_t(i)]);
    }
}

TEST(Decompose, MatchesSerialReference) {
    RadarParams p;
    p.residual_fm_rate = -1500.0;
    const auto slc = random_raster(200, 7, p, 8);
    const auto spec = make_spec(slc, 3);
    EXPECT_NE(spec.shift_per_bin, 0.0);
    const auto par = decompose(slc, spec), ser = serial::decompose(slc, spec);
    for (int k = 0; k < 3; ++k) EXPECT_LE(rel_diff(par.looks[std::size_t(k)], ser.looks[std::size_t(k)]), 1e-14);
    EXPECT_NEAR(recompose_check(par, slc), serial::recompose_check(ser, slc), 1e-14);
}

TEST(Decompose, LookShiftRecentresResidualFmTargets) {
    // With residual azimuth FM a sub-band's response is displaced by f_c / Ka seconds;
    // the circular shift brings every look's peak back to the target.
    SceneSpec scene;
    scene.height = 512;
    scene.width = 1;
    scene.background_reflectivity = 0.0;
    scene.point_targets = {{250, 0, 1.0}};
    RadarParams p;
    p.hamming_coefficient = 1.0;
    p.residual_fm_rate = -60000.0;
    const auto sim = simulate_slc(scene, p);
    const auto set = decompose(sim.slc, make_spec(sim.slc, 3));
    for (const auto& look : set.looks) {
        int arg = 0;
        for (int az = 0; az < 512; ++az)
            if (std::norm(look.at(az, 0)) > std::norm(look.at(arg, 0))) arg = az;
        EXPECT_NEAR(arg, 250, 1);
    }
}

TEST(RecomposeCheck, ExactOnSimulatorInputs) {
    SceneSpec scene;
    scene.height = 256;
    scene.width = 32;
    scene.point_targets = {{30, 4, 10.0}};
    scene.rng_seed = 3;
    for (int k = 2; k <= 4; ++k) {
        const auto sim = simulate_slc(scene, RadarParams{});
        const auto set = decompose(sim.slc, make_spec(sim.slc, k));
        EXPECT_LE(recompose_check(set, sim.slc), 1e-10);
    }
}

TEST(RecomposeCheck, ZeroedLookGivesEnergyShare) {
    const auto slc = random_raster(300, 5, params_for(0.8, 1.0), 12);
    const auto spec = make_spec(slc, 3);
    auto set = decompose(slc, spec);
    double e1 = 0, total = 0;
    for (int k = 0; k < 3; ++k)
        for (const auto& v : set.looks[std::size_t(k)].data) {
            total += std::norm(v);
            if (k == 1) e1 += std::norm(v);
        }
    for (auto& v : set.looks[1].data) v = 0.0;
    const double r = recompose_check(set, slc);
    EXPECT_GT(r, 0.0);
    EXPECT_NEAR(r, std::sqrt(e1 / total), 1e-9);
}

TEST(RecomposeCheck, ZeroInputRule) {
    ComplexRaster zero(128, 4, RadarParams{});
    const auto set = decompose(zero, make_spec(zero, 3));
    for (const auto& l : set.looks)
        for (const auto& v : l.data) EXPECT_EQ(v, cdouble{});
    EXPECT_EQ(recompose_check(set, zero), 0.0);
}

TEST(Decompose, Errors) {
    auto slc = random_raster(128, 4, RadarParams{}, 1);
    const auto spec = make_spec(slc, 3);
    auto bad = slc;
    bad.data[5] = {std::nan(""), 0.0};
    EXPECT_THROW(decompose(bad, spec), Error);
    const auto other = random_raster(130, 4, RadarParams{}, 1);
    EXPECT_THROW(decompose(other, spec), Error);
    auto set = decompose(slc, spec);
    set.looks[0] = ComplexRaster(128, 3, RadarParams{});
    EXPECT_THROW(recompose_check(set, slc), Error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "sarsub/metrics.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/report.hpp"
#include "sarsub/slc_sim.hpp"
#include "oracles.hpp"

using namespace sarsub;

namespace {

SceneSpec default_scene() {
    std::ifstream in(std::string(SARSUB_DATA_DIR) + "/default_scene.json");
    return nlohmann::json::parse(in).get<SceneSpec>();
}

IntensityRaster normalized(const Plane& p, ClipBounds b = {-20.0, 10.0}) {
    IntensityRaster r;
    r.plane = p;
    r.state = RadiometricState::normalized_unit;
    r.clip_bounds = b;
    return r;
}

}  // namespace

TEST(MetricValue, NonFiniteMarkers) {
    EXPECT_EQ(metric_value(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(metric_value(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_TRUE(metric_value(std::nan("")).is_null());
    EXPECT_EQ(metric_value(1.5), 1.5);
    EXPECT_TRUE(std::isinf(metric_from_json("inf")));
    EXPECT_TRUE(std::isnan(metric_from_json(nullptr)));
    EXPECT_EQ(metric_from_json(2.25), 2.25);
}

TEST(Evaluate, MatchesIndividualMetrics) {
    Plane a(64, 64), b(64, 64);
    oracle::Lcg rng(1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data[i] = rng.uniform();
        b.data[i] = std::clamp(a.data[i] + 0.05 * rng.normal(), 0.0, 1.0);
    }
    const auto pred = normalized(a), ref = normalized(b);
    const std::vector<Rect> rois{Rect{0, 0, 32, 32}, Rect{32, 32, 32, 32}};
    std::vector<std::string> warnings;
    const auto e = evaluate(pred, ref, rois, "m", 2, {}, &warnings);
    EXPECT_EQ(e.method, "m");
    EXPECT_EQ(e.pass, 2);
    EXPECT_DOUBLE_EQ(e.psnr_db, psnr(a, b));
    EXPECT_DOUBLE_EQ(e.ssim, ssim(a, b));
    EXPECT_DOUBLE_EQ(e.kde_distance, kde_distance(a.data, b.data));
    EXPECT_DOUBLE_EQ(e.enl, enl(normalized_to_linear(pred), rois).value);
    EXPECT_TRUE(warnings.empty());

    const auto none = evaluate(pred, ref, {}, "m", 0, {}, &warnings);
    EXPECT_TRUE(std::isnan(none.enl));
    EXPECT_FALSE(warnings.empty());
}

TEST(Evaluate, AverageOfEntries) {
    std::vector<EvalEntry> es(3);
    for (int i = 0; i < 3; ++i) {
        es[std::size_t(i)].scene_id = "s";
        es[std::size_t(i)].method = "SI";
        es[std::size_t(i)].psnr_db = 10.0 + i;
        es[std::size_t(i)].ssim = 0.1 * i;
        es[std::size_t(i)].enl = 2.0 * i;
        es[std::size_t(i)].kde_distance = 0.3;
    }
    const auto m = average_entries(es);
    EXPECT_EQ(m.outputs, 3);
    EXPECT_DOUBLE_EQ(m.psnr_db, 11.0);
    EXPECT_NEAR(m.ssim, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(m.enl, 2.0);
    EXPECT_DOUBLE_EQ(m.kde_distance, 0.3);
}

TEST(EvalReport, AggregatesAcrossScenesAndRoundTrips) {
    EvalReport r;
    r.reference = "clean";
    for (const char* id : {"a", "b"})
        for (auto pol : {Polarization::VV, Polarization::VH}) {
            EvalEntry e;
            e.scene_id = id;
            e.polarization = pol;
            e.method = "MF-multilook";
            e.psnr_db = id[0] == 'a' ? 20.0 : 22.0;
            e.ssim = 0.5;
            e.enl = pol == Polarization::VV ? 3.0 : 4.0;
            e.kde_distance = 0.1;
            r.entries.push_back(e);
        }
    r.entries.back().psnr_db = std::numeric_limits<double>::infinity();
    r.aggregate();
    ASSERT_EQ(r.aggregates.size(), 2u);
    EXPECT_EQ(r.aggregates[0].scenes, 2);
    EXPECT_DOUBLE_EQ(r.aggregates[0].psnr_db, 21.0);
    EXPECT_TRUE(std::isinf(r.aggregates[1].psnr_db));
    const nlohmann::json j = r;
    EXPECT_EQ(j.at("format"), "sarsub-eval-1");
    const auto back = j.get<EvalReport>();
    EXPECT_EQ(nlohmann::json(back), j);

    const auto table = format_table(r);
    EXPECT_NE(table.find("SSIM VV"), std::string::npos);
    EXPECT_NE(table.find("ENL VH"), std::string::npos);
    EXPECT_NE(table.find("MF-multilook"), std::string::npos);
    EXPECT_NE(table.find("50.0"), std::string::npos);  // SSIM printed x100
}

TEST(HomogeneousRois, DefaultSceneYieldsTwentyCleanSquares) {
    const auto spec = default_scene();
    const auto set = homogeneous_rois(spec, "s");
    ASSERT_EQ(set.rois.size(), 20u);
    EXPECT_NO_THROW(set.validate());
    EXPECT_NO_THROW(set.validate_bounds("s", spec.height, spec.width));
    const auto refl = reflectivity_map(spec);
    for (const auto& roi : set.rois) {
        const auto& r = roi.rect;
        EXPECT_GE(r.height, RoiSet::kMinSize);
        const double v0 = refl.at(r.az, r.rg);
        for (int y = r.az; y < r.az + r.height; ++y)
            for (int x = r.rg; x < r.rg + r.width; ++x) ASSERT_EQ(refl.at(y, x), v0);
        for (const auto& t : spec.point_targets)
            EXPECT_FALSE(t.az >= r.az - 4 && t.az < r.az + r.height + 4 && t.rg >= r.rg - 4 && t.rg < r.rg + r.width + 4);
    }
}

TEST(HomogeneousRois, SimulatedRoisAreSingleLook) {
    const auto spec = default_scene();
    const auto sim = simulate_slc(spec, RadarParams{});
    const auto rois = homogeneous_rois(spec, "s").for_scene("s");
    const auto r = enl(to_intensity(sim.slc), rois);
    EXPECT_EQ(r.excluded, 0u);
    EXPECT_NEAR(r.value, 1.0, 0.15);
}

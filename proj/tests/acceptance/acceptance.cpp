// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sarsub/enhance.hpp"
#include "sarsub/error.hpp"
#include "sarsub/grdf.hpp"
#include "sarsub/metrics.hpp"
#include "sarsub/parallel.hpp"
#include "sarsub/pipeline.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/report.hpp"
#include "sarsub/slc_sim.hpp"
#include "sarsub/subaperture.hpp"
#include "grdf_fixtures.hpp"
#include "oracles.hpp"

using namespace sarsub;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %-28s %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs, budget_s,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sarsub_accept_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<oracle::cd> column(const ComplexRaster& r, int rg) {
    std::vector<oracle::cd> c(static_cast<std::size_t>(r.height));
    for (int az = 0; az < r.height; ++az) c[std::size_t(az)] = r.at(az, rg);
    return c;
}

double roi_enl(const Plane& linear, const std::vector<Rect>& rois) { return enl(linear, rois).value; }

IntensityRaster normalized(const IntensityRaster& linear, const ClipBounds& b) {
    return clip_and_normalize(to_db(linear), b);
}

// --- criteria --------------------------------------------------------------

Outcome spectral_exactness() {
    oracle::Lcg rng(101);
    double worst = 0.0;
    int checks = 0;
    for (int i = 0; i < 20; ++i) {
        SceneSpec spec;
        spec.height = 64 + int(rng.uniform() * 200);
        spec.width = 16 + int(rng.uniform() * 32);
        spec.rng_seed = 1000 + std::uint64_t(i);
        spec.point_targets.push_back({spec.height / 3, spec.width / 2, 5.0});
        RadarParams radar;
        radar.hamming_coefficient = 0.54 + 0.46 * rng.uniform();
        radar.azimuth_prf = 1300.0 + 800.0 * rng.uniform();
        if (i % 4 == 3) radar.residual_fm_rate = -2000.0 - 4000.0 * rng.uniform();
        const auto slc = simulate_slc(spec, radar).slc;
        for (int k = 2; k <= 4; ++k) {
            const auto set = decompose(slc, make_spec(slc, k));
            worst = std::max(worst, recompose_check(set, slc));
            ++checks;
        }
    }
    return {worst <= 1e-10, fmt("max residual %.2e over %d decompositions (tol 1e-10)", worst, checks)};
}

Outcome resolution_law() {
    SceneSpec spec;
    spec.height = 512;
    spec.width = 8;
    spec.background_reflectivity = 0.0;
    spec.point_targets.push_back({256, 4, 10.0});
    RadarParams radar;
    radar.hamming_coefficient = 1.0;  // unweighted aperture, nothing to de-weight
    const auto slc = simulate_slc(spec, radar).slc;
    const auto sub = make_spec(slc, 3);
    const auto set = decompose(slc, sub);
    const double full = oracle::width_3db(column(slc, 4));
    double lo = 1e9, hi = 0.0;
    std::ostringstream ratios;
    for (std::size_t k = 0; k < set.looks.size(); ++k) {
        const double r = oracle::width_3db(column(set.looks[k], 4)) / full;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ratios << (k ? ", " : "") << fmt("%.3f", r);
    }
    const bool ok = lo >= 3.0 * 0.9 && hi <= 3.0 * 1.1;
    return {ok, fmt("full width %.3f px, look/full ratios [%s] (want 3 +- 10%%)", full, ratios.str().c_str())};
}

Outcome speckle_statistics() {
    SceneSpec spec;
    spec.height = 512;
    spec.width = 256;  // 131072 pixels
    const std::vector<Rect> whole{Rect{0, 0, spec.height, spec.width}};
    std::vector<Plane> singles;
    for (int l = 0; l < 4; ++l) {
        spec.rng_seed = 500 + std::uint64_t(l);
        singles.push_back(to_intensity(simulate_slc(spec, RadarParams{}).slc).plane);
    }
    bool ok = true;
    std::ostringstream d;
    const double e1 = roi_enl(singles[0], whole);
    ok = ok && std::abs(e1 - 1.0) <= 0.05;
    d << fmt("L=1: %.3f", e1);
    for (int L = 2; L <= 4; ++L) {
        Plane avg(spec.height, spec.width);
        for (int l = 0; l < L; ++l)
            for (std::size_t i = 0; i < avg.size(); ++i) avg.data[i] += singles[std::size_t(l)].data[i] / L;
        const double e = roi_enl(avg, whole);
        ok = ok && std::abs(e - L) <= 0.05 * L;
        d << fmt(", L=%d: %.3f", L, e);
    }
    d << " (tol 5%)";
    return {ok, d.str()};
}

Outcome subaperture_multilook() {
    SceneSpec spec;  // 512 x 512 homogeneous
    spec.rng_seed = 77;
    const auto slc = simulate_slc(spec, RadarParams{}).slc;
    const auto set = decompose(slc, make_spec(slc, 3));
    const ClipBounds wide{-60.0, 30.0};
    std::vector<IntensityRaster> looks;
    for (const auto& l : set.looks) looks.push_back(normalized(to_intensity(l), wide));
    EnhancerBinding ml;
    ml.kind = EnhancerKind::subap_multilook;
    ml.arity = Arity::mf;
    const auto out = normalized_to_linear(enhance_tiled(looks, ml, TilingPlan{}));
    const std::vector<Rect> roi{Rect{16, 16, 480, 480}};
    const double single = roi_enl(to_intensity(slc).plane, roi);
    const double multi = roi_enl(out.plane, roi);
    const double factor = multi / single;
    return {std::abs(factor - 3.0) <= 0.45,
            fmt("ENL single %.3f, 3-look average %.3f, factor %.3f (want 3 +- 15%%)", single, multi, factor)};
}

Outcome percentile_clipping() {
    oracle::Lcg rng(31);
    double worst = 0.0;  // in bin widths
    bool tails = true;
    for (int d = 0; d < 10; ++d) {
        const std::size_t n = 100000 + std::size_t(rng.uniform() * 900000);
        std::vector<double> v(n);
        for (auto& x : v) {
            switch (d % 5) {
                case 0: x = 10.0 * std::log10(-std::log(rng.uniform())); break;      // single-look speckle
                case 1: x = -15.0 + 4.0 * rng.normal(); break;
                case 2: x = -30.0 + 30.0 * rng.uniform(); break;
                case 3: x = std::round(8.0 * rng.normal()) / 2.0; break;              // heavy ties
                default: x = rng.uniform() < 0.98 ? rng.normal() : 40.0 * rng.uniform(); break;  // sparse tail
            }
        }
        IntensityRaster r;
        r.plane = Plane(1, int(n));
        r.plane.data = v;
        r.state = RadiometricState::decibel;
        const auto spec = fit_clip(std::span<const IntensityRaster>(&r, 1), ClipSpec{});
        const auto b = spec.bounds_for(Polarization::VV);
        const double w = spec.histograms.at(Polarization::VV).bin_width();
        worst = std::max({worst, std::abs(b.low_db - oracle::nearest_rank(v, 0.1)) / w,
                          std::abs(b.high_db - oracle::nearest_rank(v, 99.9)) / w});
        std::size_t below = 0, above = 0;
        for (double x : v) {
            below += x < b.low_db;
            above += x > b.high_db;
        }
        tails = tails && double(below) <= 0.001 * double(n) && double(above) <= 0.001 * double(n);
    }
    return {worst <= 1.0 && tails,
            fmt("max |histogram - sort oracle| = %.3f bin widths over 10 datasets; tails <= 0.1%%: %s", worst,
                tails ? "yes" : "no")};
}

Outcome tiling_identity() {
    struct Case { int h, w, tile; double overlap; };
    const std::vector<Case> cases{{512, 512, 96, 0.5}, {300, 200, 96, 0.5}, {97, 131, 96, 0.5},  {50, 70, 96, 0.5},
                                  {256, 256, 32, 0.0}, {200, 180, 32, 0.25}, {250, 300, 64, 0.5}, {250, 300, 64, 0.75},
                                  {33, 300, 48, 0.5},  {400, 64, 128, 0.25}, {181, 181, 96, 0.75}, {40, 40, 40, 0.5},
                                  {310, 205, 80, 0.3}};
    oracle::Lcg rng(9);
    double worst = 0.0;
    EnhancerBinding id;
    for (const auto& c : cases) {
        IntensityRaster in;
        in.plane = Plane(c.h, c.w);
        for (auto& v : in.plane.data) v = rng.uniform();
        in.state = RadiometricState::normalized_unit;
        const std::vector<IntensityRaster> inputs{in};
        const auto out = enhance_tiled(inputs, id, TilingPlan{c.tile, c.overlap});
        if (!out.same_grid(in)) return {false, "output grid differs from input"};
        for (std::size_t i = 0; i < in.plane.size(); ++i)
            worst = std::max(worst, std::abs(out.plane.data[i] - in.plane.data[i]));
    }
    return {worst <= 1e-6, fmt("max abs deviation %.2e over %zu plans (tol 1e-6)", worst, cases.size())};
}

// Fine range stripes on the left half carry the structure that repeated smoothing
// erodes; the right half is flat and hosts the ENL regions.
SceneSpec refinement_scene() {
    SceneSpec spec;
    spec.height = 512;
    spec.width = 256;
    spec.background_reflectivity = 1.0;
    spec.rng_seed = 404;
    for (int rg = 0; rg < 128; rg += 8) spec.homogeneous_regions.push_back({Rect{0, rg, 512, 4}, 8.0});
    return spec;
}

Outcome refinement_trend() {
    const auto spec = refinement_scene();
    const auto sim = simulate_slc(spec, RadarParams{});
    const auto set = decompose(sim.slc, make_spec(sim.slc, 3));
    std::vector<IntensityRaster> db{to_db(to_intensity(sim.slc))};
    for (const auto& l : set.looks) db.push_back(to_db(to_intensity(l)));
    const auto clip = fit_clip(db, ClipSpec{});
    const auto& bounds = clip.bounds_for(Polarization::VV);
    const auto clean = normalized(sim.clean_reflectivity, bounds);
    const std::vector<IntensityRaster> input{clip_and_normalize(db[1], bounds)};

    EnhancerBinding box;
    box.kind = EnhancerKind::boxcar;
    box.window = 3;
    const auto stages = iterate_refine(input, box, box, 4, TilingPlan{});
    const std::vector<Rect> rois{Rect{32, 160, 64, 64}, Rect{160, 160, 64, 64}, Rect{288, 160, 64, 64},
                                 Rect{416, 160, 64, 64}};
    std::vector<double> enls, psnrs;
    std::ostringstream d;
    for (std::size_t p = 0; p < stages.size(); ++p) {
        enls.push_back(enl(normalized_to_linear(stages[p]), rois).value);
        psnrs.push_back(psnr(stages[p], clean));
        d << fmt("%spass %zu ENL %.2f PSNR %.2f", p ? ", " : "", p, enls.back(), psnrs.back());
    }
    bool enl_up = true;
    for (std::size_t p = 1; p < enls.size(); ++p) enl_up = enl_up && enls[p] > enls[p - 1];
    const auto peak = std::size_t(std::max_element(psnrs.begin(), psnrs.end()) - psnrs.begin());
    bool falls = peak < 4;
    for (std::size_t p = peak + 1; p < psnrs.size(); ++p) falls = falls && psnrs[p] < psnrs[p - 1];
    d << fmt("; PSNR peak at pass %zu", peak);
    return {enl_up && falls, d.str()};
}

Outcome metric_oracles() {
    double worst = 0.0;
    bool identities = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        oracle::Lcg rng(seed);
        Plane a(32, 32), b(32, 32);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a.data[i] = rng.uniform();
            b.data[i] = std::clamp(a.data[i] + 0.2 * rng.normal(), 0.0, 1.0);
        }
        const std::vector<Rect> whole{Rect{0, 0, 32, 32}};
        worst = std::max({worst, std::abs(psnr(a, b) - oracle::psnr(a.data, b.data)),
                          std::abs(ssim(a, b) - oracle::ssim(a, b)),
                          std::abs(enl(a, whole).value - oracle::enl(a.data)),
                          std::abs(kde_distance(a.data, b.data) - oracle::kde_distance(a.data, b.data))});
        identities = identities && std::abs(ssim(a, a) - 1.0) <= 1e-12 && kde_distance(a.data, a.data) <= 1e-12;
    }
    return {worst <= 1e-9 && identities,
            fmt("max |library - oracle| %.2e on 10 fixtures (tol 1e-9); SSIM(a,a)=1, d(a,a)=0: %s", worst,
                identities ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome reproducibility() {
    const auto dir = scratch("repro");
    auto config = load_pipeline_config(fs::path(SARSUB_DATA_DIR) / "default_pipeline.json");
    config.out_dir = dir / "a";
    run_pipeline(config);
    const int threads = num_threads();
    set_num_threads(1);
    config.out_dir = dir / "b";
    run_pipeline(config);
    set_num_threads(threads);
    const auto a = slurp(dir / "a" / "report.json"), b = slurp(dir / "b" / "report.json");
    const auto entries = nlohmann::json::parse(a).at("entries").size();
    fs::remove_all(dir);
    return {!a.empty() && a == b,
            fmt("report.json %zu bytes, %zu entries, %s (runs with %d and 1 threads)", a.size(), entries,
                a == b ? "bit-identical" : "DIFFERENT", threads)};
}

Outcome grdf_format() {
    const auto dir = scratch("grdf");
    oracle::Lcg rng(5);
    ComplexRaster c(37, 29);
    for (auto& z : c.data) z = {double(float(rng.normal())), double(float(rng.normal()))};
    write_grdf(c, dir / "c.grdf");
    const auto cb = read_complex_grdf(dir / "c.grdf");
    bool exact = cb.data == c.data;

    IntensityRaster r;
    r.plane = Plane(13, 21);
    for (auto& v : r.plane.data) v = double(float(rng.uniform()));
    r.nodata.assign(r.plane.size(), 0);
    for (std::size_t i = 0; i < r.nodata.size(); i += 7) r.nodata[i] = 1;
    r.state = RadiometricState::normalized_unit;
    r.clip_bounds = ClipBounds{-21.5, 3.25};
    write_grdf(r, dir / "r.grdf");
    const auto rb = read_intensity_grdf(dir / "r.grdf");
    exact = exact && rb.plane == r.plane && rb.nodata == r.nodata && rb.clip_bounds == r.clip_bounds;

    int right = 0, total = 0;
    std::string wrong;
    for (const auto& fx : oracle::write_malformed_fixtures(dir / "fixtures")) {
        ++total;
        try {
            read_grdf(fx.path);
            wrong += " " + fx.name + "(accepted)";
        } catch (const Error& e) {
            if (e.kind() == fx.expected && std::string(e.what()).find(fx.message_fragment) != std::string::npos)
                ++right;
            else
                wrong += " " + fx.name + "(" + to_string(e.kind()) + ")";
        }
    }
    fs::remove_all(dir);
    return {exact && right == total, fmt("round trip %s; %d/%d malformed fixtures raise their error kind%s",
                                         exact ? "bit-exact" : "NOT exact", right, total, wrong.c_str())};
}

}  // namespace

int main() {
    criterion("spectral-exactness", 10, spectral_exactness);
    criterion("resolution-law", 30, resolution_law);
    criterion("speckle-statistics", 30, speckle_statistics);
    criterion("subaperture-multilook", 30, subaperture_multilook);
    criterion("percentile-clipping", 30, percentile_clipping);
    criterion("tiling-identity", 60, tiling_identity);
    criterion("refinement-trend", 120, refinement_trend);
    criterion("metric-oracles", 60, metric_oracles);
    criterion("pipeline-reproducibility", 300, reproducibility);
    criterion("grdf-format", 60, grdf_format);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

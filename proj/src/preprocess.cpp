#include "sarsub/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "sarsub/error.hpp"

namespace sarsub {

IntensityRaster to_intensity(const ComplexRaster& look) {
    look.validate();
    IntensityRaster out;
    out.plane = Plane(look.height, look.width);
    out.state = RadiometricState::linear_power;
    out.scene_id = look.scene_id;
    out.polarization = look.polarization;
    const std::size_t n = look.data.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) out.plane.data[i] = std::norm(look.data[i]);
    return out;
}

IntensityRaster to_db(const IntensityRaster& linear, double floor) {
    linear.require_state(RadiometricState::linear_power, "to_db");
    require(floor > 0, "dB floor must be positive");
    IntensityRaster out = linear;
    out.state = RadiometricState::decibel;
    out.clip_bounds.reset();
    out.nodata.assign(linear.plane.size(), 0);
    const std::size_t n = linear.plane.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double v = linear.plane.data[i];
        out.plane.data[i] = 10.0 * std::log10(std::max(v, floor));
        out.nodata[i] = (linear.masked(i) || !(v > floor)) ? 1 : 0;
    }
    return out;
}

IntensityRaster db_to_linear(const IntensityRaster& db) {
    db.require_state(RadiometricState::decibel, "db_to_linear");
    IntensityRaster out = db;
    out.state = RadiometricState::linear_power;
    out.clip_bounds.reset();
    const std::size_t n = db.plane.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) out.plane.data[i] = std::pow(10.0, db.plane.data[i] / 10.0);
    return out;
}

double PercentileHistogram::percentile(double p, Edge edge) const {
    require(total > 0, "percentile of an empty histogram");
    if (hi == lo) return lo;
    const double rank = std::ceil(std::clamp(p, 0.0, 100.0) / 100.0 * double(total));
    const std::uint64_t j = rank < 1.0 ? 0 : std::min(std::uint64_t(rank) - 1, total - 1);
    std::uint64_t before = 0;
    std::size_t b = 0;
    for (; b < counts.size(); ++b) {
        if (j < before + counts[b]) break;
        before += counts[b];
    }
    b = std::min(b, counts.size() - 1);
    return lo + (double(b) + (edge == Edge::upper ? 1.0 : 0.0)) * bin_width();
}

void ClipSpec::validate() const {
    require(low_percentile >= 0 && low_percentile < high_percentile && high_percentile <= 100,
            "clip percentiles must satisfy 0 <= low < high <= 100");
    require(histogram_bins >= 2, "clip histogram needs at least 2 bins");
    for (const auto& [pol, b] : bounds)
        require(std::isfinite(b.low_db) && std::isfinite(b.high_db), "clip bounds must be finite");
}

const ClipBounds& ClipSpec::bounds_for(Polarization p) const {
    auto it = bounds.find(p);
    if (it == bounds.end()) fail(ErrorKind::validation, std::string("no clip bounds for polarization ") + to_string(p));
    return it->second;
}

void to_json(nlohmann::json& j, const ClipSpec& s) {
    nlohmann::json bounds = nlohmann::json::object(), hists = nlohmann::json::object();
    for (const auto& [pol, b] : s.bounds) bounds[to_string(pol)] = {{"low_db", b.low_db}, {"high_db", b.high_db}};
    for (const auto& [pol, h] : s.histograms)
        hists[to_string(pol)] = {{"range", {h.lo, h.hi}}, {"total", h.total}, {"counts", h.counts}};
    j = nlohmann::json{{"low_percentile", s.low_percentile},
                       {"high_percentile", s.high_percentile},
                       {"per_polarization", s.per_polarization},
                       {"histogram_bins", s.histogram_bins},
                       {"bounds", bounds},
                       {"histograms", hists}};
}

void from_json(const nlohmann::json& j, ClipSpec& s) {
    s = ClipSpec{};
    s.low_percentile = j.value("low_percentile", 0.1);
    s.high_percentile = j.value("high_percentile", 99.9);
    s.per_polarization = j.value("per_polarization", true);
    s.histogram_bins = j.value("histogram_bins", kClipHistogramBins);
    const auto bounds_json = j.value("bounds", nlohmann::json::object());
    for (const auto& [key, b] : bounds_json.items())
        s.bounds[parse_polarization(key)] = {b.at("low_db").get<double>(), b.at("high_db").get<double>()};
    const auto histograms_json = j.value("histograms", nlohmann::json::object());
    for (const auto& [key, h] : histograms_json.items()) {
        PercentileHistogram ph;
        ph.lo = h.at("range").at(0).get<double>();
        ph.hi = h.at("range").at(1).get<double>();
        ph.total = h.at("total").get<std::uint64_t>();
        ph.counts = h.at("counts").get<std::vector<std::uint64_t>>();
        s.histograms[parse_polarization(key)] = std::move(ph);
    }
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::uint64_t count = 0;
};

Range observed_range(std::span<const IntensityRaster* const> rasters) {
    Range r;
    for (const auto* raster : rasters) {
        const std::size_t n = raster->plane.size();
        double lo = r.lo, hi = r.hi;
        std::uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) reduction(+ : count)
        for (std::size_t i = 0; i < n; ++i) {
            if (raster->masked(i)) continue;
            const double v = raster->plane.data[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++count;
        }
        r.lo = lo;
        r.hi = hi;
        r.count += count;
    }
    return r;
}

}  // namespace

PercentileHistogram build_histogram(std::span<const IntensityRaster* const> rasters, int bins) {
    require(bins >= 2, "histogram needs at least 2 bins");
    for (const auto* r : rasters) {
        r->require_state(RadiometricState::decibel, "fit_clip");
        for (double v : r->plane.data)
            if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite value in clip dataset");
    }
    const Range range = observed_range(rasters);
    if (range.count == 0) fail(ErrorKind::validation, "clip dataset has no unmasked pixels");

    PercentileHistogram h;
    h.lo = range.lo;
    h.hi = range.hi;
    h.total = range.count;
    h.counts.assign(std::size_t(bins), 0);
    const double scale = h.hi > h.lo ? double(bins) / (h.hi - h.lo) : 0.0;

    for (const auto* raster : rasters) {
        const std::size_t n = raster->plane.size();
#pragma omp parallel
        {
            std::vector<std::uint64_t> local(std::size_t(bins), 0);
#pragma omp for schedule(static) nowait
            for (std::size_t i = 0; i < n; ++i) {
                if (raster->masked(i)) continue;
                const auto b = std::min<std::size_t>(std::size_t((raster->plane.data[i] - h.lo) * scale),
                                                     std::size_t(bins) - 1);
                ++local[b];
            }
#pragma omp critical(sarsub_histogram_merge)
            for (std::size_t b = 0; b < local.size(); ++b) h.counts[b] += local[b];
        }
    }
    return h;
}

ClipSpec fit_clip(std::span<const IntensityRaster* const> dataset, ClipSpec spec) {
    spec.validate();
    if (dataset.empty()) fail(ErrorKind::validation, "clip dataset is empty");
    spec.bounds.clear();
    spec.histograms.clear();

    std::map<Polarization, std::vector<const IntensityRaster*>> groups;
    for (const auto* r : dataset) groups[spec.per_polarization ? r->polarization : Polarization::VV].push_back(r);

    for (const auto& [pol, rasters] : groups) {
        auto h = build_histogram(rasters, spec.histogram_bins);
        const ClipBounds b{h.percentile(spec.low_percentile, PercentileHistogram::Edge::lower),
                           h.percentile(spec.high_percentile, PercentileHistogram::Edge::upper)};
        if (spec.per_polarization) {
            spec.bounds[pol] = b;
            spec.histograms[pol] = std::move(h);
        } else {
            for (const auto* r : dataset) {
                spec.bounds[r->polarization] = b;
                spec.histograms[r->polarization] = h;
            }
        }
    }
    return spec;
}

ClipSpec fit_clip(std::span<const IntensityRaster> dataset, ClipSpec spec) {
    std::vector<const IntensityRaster*> ptrs;
    for (const auto& r : dataset) ptrs.push_back(&r);
    return fit_clip(std::span<const IntensityRaster* const>(ptrs), std::move(spec));
}

IntensityRaster clip_and_normalize(const IntensityRaster& db, const ClipSpec& spec) {
    return clip_and_normalize(db, spec.bounds_for(db.polarization));
}

IntensityRaster clip_and_normalize(const IntensityRaster& db, const ClipBounds& bounds) {
    db.require_state(RadiometricState::decibel, "clip_and_normalize");
    if (!(bounds.high_db > bounds.low_db))
        fail(ErrorKind::validation, "clip bounds are degenerate (high <= low)");
    IntensityRaster out = db;
    out.state = RadiometricState::normalized_unit;
    out.clip_bounds = bounds;
    const double lo = bounds.low_db, span = bounds.high_db - bounds.low_db;
    const std::size_t n = db.plane.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        out.plane.data[i] = db.masked(i) ? 0.0 : (std::clamp(db.plane.data[i], lo, bounds.high_db) - lo) / span;
    return out;
}

IntensityRaster denormalize(const IntensityRaster& normalized) {
    normalized.require_state(RadiometricState::normalized_unit, "denormalize");
    if (!normalized.clip_bounds) fail(ErrorKind::validation, "normalized raster carries no clip bounds");
    const auto b = *normalized.clip_bounds;
    IntensityRaster out = normalized;
    out.state = RadiometricState::decibel;
    const std::size_t n = out.plane.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        out.plane.data[i] = b.low_db + normalized.plane.data[i] * (b.high_db - b.low_db);
    return out;
}

IntensityRaster normalized_to_linear(const IntensityRaster& normalized) {
    return db_to_linear(denormalize(normalized));
}

}  // namespace sarsub

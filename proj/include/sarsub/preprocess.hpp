#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sarsub/raster.hpp"

namespace sarsub {

inline constexpr double kDefaultDbFloor = 1e-10;  // linear power, -100 dB
inline constexpr int kClipHistogramBins = 1 << 16;

// |z|^2 per pixel.
IntensityRaster to_intensity(const ComplexRaster& look);

// 10 log10(max(v, floor)); pixels at or below the floor join the no-data mask.
IntensityRaster to_db(const IntensityRaster& linear, double floor = kDefaultDbFloor);

IntensityRaster db_to_linear(const IntensityRaster& db);

// Fixed-resolution histogram over [lo, hi] used for dataset-wide percentiles.
struct PercentileHistogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / double(counts.size()); }
    enum class Edge { lower, upper };
    // Edge of the bin holding the nearest-rank sample ceil(p/100 total).
    // Lower edges never leave more than p% below; upper edges never more than (100-p)% above.
    double percentile(double p, Edge edge) const;
    bool operator==(const PercentileHistogram&) const = default;
};

struct ClipSpec {
    double low_percentile = 0.1;
    double high_percentile = 99.9;
    bool per_polarization = true;
    int histogram_bins = kClipHistogramBins;
    std::map<Polarization, ClipBounds> bounds;
    std::map<Polarization, PercentileHistogram> histograms;

    void validate() const;
    const ClipBounds& bounds_for(Polarization p) const;
};

void to_json(nlohmann::json& j, const ClipSpec& s);
void from_json(const nlohmann::json& j, ClipSpec& s);

PercentileHistogram build_histogram(std::span<const IntensityRaster* const> rasters, int bins);

// Dataset-wide percentile bounds, grouped by polarization unless per_polarization is false.
ClipSpec fit_clip(std::span<const IntensityRaster* const> dataset, ClipSpec spec);
ClipSpec fit_clip(std::span<const IntensityRaster> dataset, ClipSpec spec);

// (clamp(v, low, high) - low) / (high - low); records the bounds on the output.
IntensityRaster clip_and_normalize(const IntensityRaster& db, const ClipSpec& spec);
IntensityRaster clip_and_normalize(const IntensityRaster& db, const ClipBounds& bounds);

// Inverse affine map back to decibel using the raster's recorded clip bounds.
IntensityRaster denormalize(const IntensityRaster& normalized);

// normalized -> decibel -> linear power.
IntensityRaster normalized_to_linear(const IntensityRaster& normalized);

namespace serial {
PercentileHistogram build_histogram(std::span<const IntensityRaster* const> rasters, int bins);
}

}  // namespace sarsub

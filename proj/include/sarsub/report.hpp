#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarsub/metrics.hpp"
#include "sarsub/raster.hpp"
#include "sarsub/slc_sim.hpp"

namespace sarsub {

// One evaluated output. PSNR is +inf for identical rasters (serialized as "inf");
// ENL is NaN when the scene has no usable ROI (serialized as null).
struct EvalEntry {
    std::string scene_id;
    Polarization polarization = Polarization::VV;
    std::string method;
    int pass = 0;
    int outputs = 1;  // metrics averaged over this many outputs (SI looks)
    double psnr_db = 0.0;
    double ssim = 0.0;
    double enl = 0.0;
    double kde_distance = 0.0;
    std::size_t enl_excluded_rois = 0;
};

// Mean over scenes for one (method, pass, polarization).
struct EvalAggregate {
    std::string method;
    int pass = 0;
    Polarization polarization = Polarization::VV;
    int scenes = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double enl = 0.0;
    double kde_distance = 0.0;
};

struct EvalReport {
    std::string reference;  // what PSNR / SSIM / KDE were measured against
    std::vector<EvalEntry> entries;
    std::vector<EvalAggregate> aggregates;
    RoiSet rois;
    std::vector<std::string> warnings;

    // Recomputes `aggregates` from `entries`, keeping first-appearance order of methods.
    void aggregate();
};

void to_json(nlohmann::json& j, const EvalEntry& e);
void from_json(const nlohmann::json& j, EvalEntry& e);
void to_json(nlohmann::json& j, const EvalAggregate& a);
void from_json(const nlohmann::json& j, EvalAggregate& a);
void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

struct EvalOptions {
    int kde_grid_points = 256;
    std::size_t kde_max_samples = 16384;
    SsimParams ssim;
};

// Metrics of normalized `pred` against normalized `ref`; ENL on the linear-power
// version of `pred` (denormalized through its clip bounds) over `rois`.
EvalEntry evaluate(const IntensityRaster& pred, const IntensityRaster& ref, std::span<const Rect> rois,
                   const std::string& method, int pass, const EvalOptions& options = {},
                   std::vector<std::string>* warnings = nullptr);

// Mean of several entries (same scene, method and pass), e.g. the K SI outputs.
EvalEntry average_entries(std::span<const EvalEntry> entries);

// Up to `count` non-overlapping size x size squares, each inside one homogeneous
// area of the scene (a declared region not covered by later regions, or the
// background), `inset` pixels clear of area borders and point targets.
RoiSet homogeneous_rois(const SceneSpec& spec, const std::string& scene_id, int count = RoiSet::kTargetCount,
                        int size = RoiSet::kMinSize, int inset = 4);

// Text table: one row per method and pass; SSIM (x100), PSNR and ENL per VV / VH,
// followed by the KDE distance per VV / VH.
std::string format_table(const EvalReport& report);

// JSON number, or "inf" / "-inf" / null for non-finite values.
nlohmann::json metric_value(double v);
double metric_from_json(const nlohmann::json& j);

}  // namespace sarsub

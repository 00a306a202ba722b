#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sarsub/raster.hpp"

namespace sarsub {

struct Roi {
    std::string scene_id;
    Rect rect;
};

// Homogeneous regions of interest; at least 32x32 each, non-overlapping within a scene.
struct RoiSet {
    std::vector<Roi> rois;

    static constexpr int kMinSize = 32;
    static constexpr int kTargetCount = 20;

    std::vector<Rect> for_scene(const std::string& scene_id) const;
    void validate() const;
    void validate_bounds(const std::string& scene_id, int height, int width) const;
};

void to_json(nlohmann::json& j, const RoiSet& r);
void from_json(const nlohmann::json& j, RoiSet& r);

// 10 log10(1 / MSE) over unmasked pixels, data range 1. +infinity when MSE is zero.
double psnr(const Plane& pred, const Plane& ref, std::span<const std::uint8_t> mask = {});
double psnr(const IntensityRaster& pred, const IntensityRaster& ref);

// Gaussian-window SSIM (Wang et al. 2004 defaults) averaged over every window
// position that fits inside the image. Masked pixels are dropped by renormalizing
// the window weights; windows centred on a masked pixel are skipped.
struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double data_range = 1.0;
};

double ssim(const Plane& pred, const Plane& ref, const SsimParams& params = {},
            std::span<const std::uint8_t> mask = {});
double ssim(const IntensityRaster& pred, const IntensityRaster& ref, const SsimParams& params = {});

struct EnlResult {
    double value = 0.0;             // mean over the ROIs that were not excluded
    std::vector<double> per_roi;    // +infinity for constant ROIs
    std::size_t excluded = 0;
    std::vector<std::string> warnings;
};

// mean^2 / variance per ROI on a linear-power raster, averaged over ROIs.
EnlResult enl(const IntensityRaster& linear, std::span<const Rect> rois);
EnlResult enl(const Plane& linear, std::span<const Rect> rois, std::span<const std::uint8_t> mask = {});

// Silverman's rule of thumb, 0.9 min(sd, IQR / 1.34) n^(-1/5), floored at 1 / grid_points.
double silverman_bandwidth(std::span<const double> samples, int grid_points);

// L1 distance between Gaussian KDEs of the two sample sets evaluated on a shared
// uniform grid over [0, 1]. Each density is normalized to unit mass on the grid,
// so the result lies in [0, 2].
double kde_distance(std::span<const double> pred, std::span<const double> ref, int grid_points = 256);

// Unmasked samples of a raster, optionally thinned to at most max_samples by a fixed stride.
std::vector<double> raster_samples(const IntensityRaster& r, std::size_t max_samples = 0);

namespace serial {
double psnr(const Plane& pred, const Plane& ref, std::span<const std::uint8_t> mask = {});
double ssim(const Plane& pred, const Plane& ref, const SsimParams& params = {},
            std::span<const std::uint8_t> mask = {});
double kde_distance(std::span<const double> pred, std::span<const double> ref, int grid_points = 256);
}  // namespace serial

}  // namespace sarsub

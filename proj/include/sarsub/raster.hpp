#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sarsub {

using cdouble = std::complex<double>;

enum class Polarization { VV, VH };
enum class RadiometricState { linear_power, decibel, normalized_unit };

const char* to_string(Polarization p);
const char* to_string(RadiometricState s);
Polarization parse_polarization(const std::string& s);
RadiometricState parse_radiometric_state(const std::string& s);

inline constexpr double kSpeedOfLight = 299792458.0;

// Acquisition parameters of an SLC. Azimuth is the row (slow-time) axis.
struct RadarParams {
    double platform_velocity = 7600.0;      // m/s
    double antenna_length = 12.3;           // m
    double transmitted_bandwidth = 5.0e7;   // Hz
    double azimuth_prf = 1700.0;            // Hz
    double hamming_coefficient = 0.75;      // generalized Hamming a, 1.0 = rectangular
    double speed_of_light = kSpeedOfLight;  // m/s
    // Residual azimuth FM rate (Hz/s) left in the focused product; 0 means fully focused.
    double residual_fm_rate = 0.0;

    double doppler_bandwidth() const { return 2.0 * platform_velocity / antenna_length; }
    void validate() const;
};

void to_json(nlohmann::json& j, const RadarParams& p);
void from_json(const nlohmann::json& j, RadarParams& p);

// Axis-aligned pixel rectangle [az, az+height) x [rg, rg+width).
struct Rect {
    int az = 0;
    int rg = 0;
    int height = 0;
    int width = 0;

    bool inside(int grid_height, int grid_width) const {
        return az >= 0 && rg >= 0 && height > 0 && width > 0 && az + height <= grid_height &&
               rg + width <= grid_width;
    }
    bool overlaps(const Rect& o) const {
        return az < o.az + o.height && o.az < az + height && rg < o.rg + o.width && o.rg < rg + width;
    }
    std::size_t area() const { return std::size_t(height) * std::size_t(width); }
};

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);

// Plain row-major real grid.
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int h, int w, double fill = 0.0) : height(h), width(w), data(std::size_t(h) * std::size_t(w), fill) {}

    std::size_t size() const { return data.size(); }
    double& at(int r, int c) { return data[std::size_t(r) * std::size_t(width) + std::size_t(c)]; }
    double at(int r, int c) const { return data[std::size_t(r) * std::size_t(width) + std::size_t(c)]; }
    bool same_grid(const Plane& o) const { return height == o.height && width == o.width; }
    bool operator==(const Plane&) const = default;
};

Plane crop(const Plane& src, const Rect& r);

struct ComplexRaster {
    int height = 0;  // azimuth
    int width = 0;   // range
    std::vector<cdouble> data;
    RadarParams params;
    bool azimuth_weighting_applied = false;
    std::string scene_id;
    Polarization polarization = Polarization::VV;

    ComplexRaster() = default;
    ComplexRaster(int h, int w, RadarParams p = {})
        : height(h), width(w), data(std::size_t(h) * std::size_t(w)), params(p) {}

    cdouble& at(int az, int rg) { return data[std::size_t(az) * std::size_t(width) + std::size_t(rg)]; }
    cdouble at(int az, int rg) const { return data[std::size_t(az) * std::size_t(width) + std::size_t(rg)]; }
    bool same_grid(const ComplexRaster& o) const { return height == o.height && width == o.width; }
    void validate() const;
};

struct ClipBounds {
    double low_db = 0.0;
    double high_db = 0.0;
    bool operator==(const ClipBounds&) const = default;
};

struct IntensityRaster {
    Plane plane;
    RadiometricState state = RadiometricState::linear_power;
    std::optional<ClipBounds> clip_bounds;
    // One byte per pixel, non-zero = no-data. Empty means every pixel is valid.
    std::vector<std::uint8_t> nodata;
    std::string scene_id;
    Polarization polarization = Polarization::VV;

    int height() const { return plane.height; }
    int width() const { return plane.width; }
    bool masked(std::size_t i) const { return !nodata.empty() && nodata[i] != 0; }
    bool has_mask() const;
    std::size_t valid_count() const;
    bool same_grid(const IntensityRaster& o) const { return plane.same_grid(o.plane); }
    void require_state(RadiometricState s, const char* op) const;
};

// Union of two masks over the same grid; either may be empty.
std::vector<std::uint8_t> mask_union(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

IntensityRaster crop(const IntensityRaster& src, const Rect& r);

}  // namespace sarsub

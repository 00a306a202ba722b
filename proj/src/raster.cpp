#include "sarsub/raster.hpp"

#include <algorithm>
#include <cmath>

#include "sarsub/error.hpp"

namespace sarsub {

const char* to_string(Polarization p) { return p == Polarization::VV ? "VV" : "VH"; }

const char* to_string(RadiometricState s) {
    switch (s) {
    case RadiometricState::linear_power: return "linear_power";
    case RadiometricState::decibel: return "decibel";
    case RadiometricState::normalized_unit: return "normalized_unit";
    }
    return "?";
}

Polarization parse_polarization(const std::string& s) {
    if (s == "VV") return Polarization::VV;
    if (s == "VH") return Polarization::VH;
    fail(ErrorKind::validation, "unknown polarization '" + s + "'");
}

RadiometricState parse_radiometric_state(const std::string& s) {
    if (s == "linear_power") return RadiometricState::linear_power;
    if (s == "decibel") return RadiometricState::decibel;
    if (s == "normalized_unit") return RadiometricState::normalized_unit;
    fail(ErrorKind::validation, "unknown radiometric state '" + s + "'");
}

void RadarParams::validate() const {
    require(platform_velocity > 0 && antenna_length > 0 && transmitted_bandwidth > 0 && azimuth_prf > 0,
            "radar parameters must be positive");
    require(speed_of_light > 0, "speed of light must be positive");
    require(hamming_coefficient > 0.5 && hamming_coefficient <= 1.0, "hamming coefficient must lie in (0.5, 1]");
    require(std::isfinite(residual_fm_rate), "residual FM rate must be finite");
    if (doppler_bandwidth() > azimuth_prf)
        fail(ErrorKind::validation, "Doppler bandwidth " + std::to_string(doppler_bandwidth()) +
                                        " Hz exceeds azimuth PRF " + std::to_string(azimuth_prf) + " Hz");
}

void to_json(nlohmann::json& j, const RadarParams& p) {
    j = nlohmann::json{{"platform_velocity", p.platform_velocity},
                       {"antenna_length", p.antenna_length},
                       {"transmitted_bandwidth", p.transmitted_bandwidth},
                       {"azimuth_prf", p.azimuth_prf},
                       {"hamming_coefficient", p.hamming_coefficient},
                       {"speed_of_light", p.speed_of_light},
                       {"residual_fm_rate", p.residual_fm_rate}};
}

void from_json(const nlohmann::json& j, RadarParams& p) {
    RadarParams d;
    p.platform_velocity = j.value("platform_velocity", d.platform_velocity);
    p.antenna_length = j.value("antenna_length", d.antenna_length);
    p.transmitted_bandwidth = j.value("transmitted_bandwidth", d.transmitted_bandwidth);
    p.azimuth_prf = j.value("azimuth_prf", d.azimuth_prf);
    p.hamming_coefficient = j.value("hamming_coefficient", d.hamming_coefficient);
    p.speed_of_light = j.value("speed_of_light", d.speed_of_light);
    p.residual_fm_rate = j.value("residual_fm_rate", d.residual_fm_rate);
}

void to_json(nlohmann::json& j, const Rect& r) {
    j = nlohmann::json{{"az", r.az}, {"rg", r.rg}, {"height", r.height}, {"width", r.width}};
}

void from_json(const nlohmann::json& j, Rect& r) {
    r.az = j.at("az").get<int>();
    r.rg = j.at("rg").get<int>();
    r.height = j.at("height").get<int>();
    r.width = j.at("width").get<int>();
}

Plane crop(const Plane& src, const Rect& r) {
    require(r.inside(src.height, src.width), "crop rectangle outside plane");
    Plane out(r.height, r.width);
    for (int y = 0; y < r.height; ++y)
        std::copy_n(&src.data[std::size_t(r.az + y) * std::size_t(src.width) + std::size_t(r.rg)], r.width,
                    &out.data[std::size_t(y) * std::size_t(r.width)]);
    return out;
}

void ComplexRaster::validate() const {
    require(height > 0 && width > 0, "complex raster must be non-empty");
    require(data.size() == std::size_t(height) * std::size_t(width), "complex raster data length mismatch");
    for (const auto& z : data)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            fail(ErrorKind::numeric, "complex raster contains non-finite samples");
}

bool IntensityRaster::has_mask() const {
    return std::any_of(nodata.begin(), nodata.end(), [](std::uint8_t m) { return m != 0; });
}

std::size_t IntensityRaster::valid_count() const {
    if (nodata.empty()) return plane.size();
    return std::size_t(std::count(nodata.begin(), nodata.end(), std::uint8_t{0}));
}

void IntensityRaster::require_state(RadiometricState s, const char* op) const {
    if (state != s)
        fail(ErrorKind::validation, std::string(op) + " expects a " + to_string(s) + " raster, got " +
                                        to_string(state));
}

std::vector<std::uint8_t> mask_union(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    require(a.size() == b.size(), "mask size mismatch");
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
    return out;
}

IntensityRaster crop(const IntensityRaster& src, const Rect& r) {
    IntensityRaster out;
    out.plane = crop(src.plane, r);
    out.state = src.state;
    out.clip_bounds = src.clip_bounds;
    out.scene_id = src.scene_id;
    out.polarization = src.polarization;
    if (!src.nodata.empty()) {
        out.nodata.resize(out.plane.size());
        for (int y = 0; y < r.height; ++y)
            for (int x = 0; x < r.width; ++x)
                out.nodata[std::size_t(y) * std::size_t(r.width) + std::size_t(x)] =
                    src.nodata[std::size_t(r.az + y) * std::size_t(src.width()) + std::size_t(r.rg + x)];
    }
    return out;
}

}  // namespace sarsub

#include "sarsub/doppler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sarsub/error.hpp"

namespace sarsub {

ProcessedBand processed_band(int azimuth_size, const RadarParams& params) {
    require(azimuth_size > 0, "azimuth size must be positive");
    const double fraction = params.doppler_bandwidth() / params.azimuth_prf;
    // small epsilon so an exact ratio such as 900/1024 does not floor down one bin
    int count = int(std::floor(double(azimuth_size) * fraction + 1e-9));
    count = std::clamp(count, 1, azimuth_size);
    return {azimuth_size / 2 - count / 2, count};
}

double WindowSpec::at(int bin_in_band, int band_count) const {
    if (type == WindowType::none || coefficient >= 1.0) return 1.0;
    const double u = (double(bin_in_band) + 0.5) / double(band_count);
    return coefficient - (1.0 - coefficient) * std::cos(2.0 * std::numbers::pi * u);
}

void to_json(nlohmann::json& j, const WindowSpec& w) {
    j = nlohmann::json{{"type", w.type == WindowType::none ? "none" : "hamming"}, {"coefficient", w.coefficient}};
}

void from_json(const nlohmann::json& j, WindowSpec& w) {
    const auto type = j.value("type", std::string("hamming"));
    if (type == "none")
        w.type = WindowType::none;
    else if (type == "hamming")
        w.type = WindowType::hamming;
    else
        fail(ErrorKind::validation, "unknown window type '" + type + "'");
    w.coefficient = j.value("coefficient", 0.75);
}

}  // namespace sarsub

#pragma once

#include "sarsub/raster.hpp"

namespace sarsub {

// Azimuth spectra are handled in centered order: index s holds Doppler bin
// (s - n/2), so zero Doppler sits at n/2 (integer division).
inline int centered_from_fft(int k, int n) { return (k + n / 2) % n; }
inline int fft_from_centered(int s, int n) { return (s - n / 2 + n) % n; }

// Contiguous run of centered bins [begin, begin + count) holding Doppler support.
struct ProcessedBand {
    int begin = 0;
    int count = 0;
    int end() const { return begin + count; }
};

// Bins whose Doppler frequency falls inside the B_D band around zero centroid.
ProcessedBand processed_band(int azimuth_size, const RadarParams& params);

enum class WindowType { none, hamming };

// Azimuth apodization over a processed band: w(u) = a - (1 - a) cos(2 pi u), u in (0, 1)
// measured from the low-Doppler band edge at bin centres.
struct WindowSpec {
    WindowType type = WindowType::hamming;
    double coefficient = 0.75;

    double at(int bin_in_band, int band_count) const;
};

void to_json(nlohmann::json& j, const WindowSpec& w);
void from_json(const nlohmann::json& j, WindowSpec& w);

}  // namespace sarsub

#pragma once

#include <string>
#include <vector>

#include "sarsub/doppler.hpp"
#include "sarsub/raster.hpp"

namespace sarsub {

// Partition of the processed azimuth band into K contiguous sub-bands.
//
// band_edges holds K+1 centered bin indices (see doppler.hpp); band k covers
// [band_edges[k], band_edges[k+1]), ordered from low to high Doppler.
struct SubapertureSpec {
    int num_looks = 3;
    int azimuth_size = 0;
    std::vector<int> band_edges;
    std::vector<double> alpha;  // bins in band k / processed bins
    WindowSpec deweight;
    double deweight_floor = 1e-3;
    // Azimuth displacement (samples) per bin of band-centre offset; 0 for a fully focused product.
    double shift_per_bin = 0.0;

    int processed_begin() const { return band_edges.front(); }
    int processed_count() const { return band_edges.back() - band_edges.front(); }
    int band_size(int k) const { return band_edges[std::size_t(k) + 1] - band_edges[std::size_t(k)]; }
    // Bins the band is moved by so that it sits centred on zero Doppler.
    int recenter_offset(int k) const;
    // Circular azimuth shift applied to look k after the inverse FFT.
    int look_shift(int k) const;

    void validate() const;
};

void to_json(nlohmann::json& j, const SubapertureSpec& s);
void from_json(const nlohmann::json& j, SubapertureSpec& s);

// Splits `count` bins starting at `begin` into k bands whose sizes differ by at
// most one; the count % k extra bins go to the highest bands. Returns k+1 edges.
std::vector<int> partition_band(int begin, int count, int k);

SubapertureSpec make_spec(const ComplexRaster& raster, int num_looks);

struct SubapertureSet {
    std::vector<ComplexRaster> looks;
    SubapertureSpec spec;
    std::string source_id;
};

SubapertureSet decompose(const ComplexRaster& slc, const SubapertureSpec& spec);

// Relative L2 residual between the spectra reassembled from the looks and the
// directly de-weighted spectrum of `slc`; 0 when the latter is empty.
double recompose_check(const SubapertureSet& set, const ComplexRaster& slc);

namespace serial {
SubapertureSet decompose(const ComplexRaster& slc, const SubapertureSpec& spec);
double recompose_check(const SubapertureSet& set, const ComplexRaster& slc);
}  // namespace serial

}  // namespace sarsub

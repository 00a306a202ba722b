#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sarsub/parallel.hpp"
#include "sarsub/raster.hpp"

namespace sarsub {

enum class Split { train, validation, test };

const char* to_string(Split s);
Split parse_split(const std::string& s);

struct SplitManifest {
    std::map<std::string, Split> assignments;  // scene_id -> split
    int patch_size = 96;
    std::map<Split, std::size_t> counts;       // patches per split

    Split split_of(const std::string& scene_id) const;
    void validate() const;
};

void to_json(nlohmann::json& j, const SplitManifest& m);
void from_json(const nlohmann::json& j, SplitManifest& m);

struct PatchPair {
    std::vector<Plane> inputs;  // K subaperture patches, canonical low -> high Doppler order
    Plane target;               // full-aperture patch
    std::string scene_id;
    Polarization polarization = Polarization::VV;
    int origin_az = 0;
    int origin_rg = 0;
    Split split = Split::train;
};

// Non-overlapping patch_size windows from (0, 0) in row-major order; windows
// touching any no-data pixel in any raster are skipped, as are partial edge tiles.
std::vector<PatchPair> extract_pairs(const IntensityRaster& full, std::span<const IntensityRaster> looks,
                                     const SplitManifest& manifest, const std::string& scene_id);

// CDF matching of `source` onto the distribution of `reference` on `levels` quantization
// levels over [0, 1], with piecewise-linear CDFs. Constant references yield a constant patch.
Plane histogram_match(const Plane& source, const Plane& reference, int levels = 256);

// Dihedral group element e in 0..7: horizontal flip when e >= 4, then e % 4 quarter turns
// counter-clockwise. Element 0 is the identity.
Plane dihedral(const Plane& p, int element);
int dihedral_inverse(int element);
PatchPair dihedral_augment(const PatchPair& pair, int element);

enum class InputMode { si, mf };

// Per-step input selection for training: SI draws one look index uniformly, MF
// draws a uniform permutation of the K look indices (0-based).
class InputSampler {
public:
    InputSampler(InputMode mode, int looks, std::uint64_t seed);
    std::vector<int> next();

private:
    InputMode mode_;
    int looks_;
    Rng rng_;
};

// Packed pair records: each record is K+1 float32 little-endian patch_size^2
// planes (inputs in order, then target); pairs_index.json describes the records.
class PairWriter {
public:
    PairWriter(const std::filesystem::path& dir, int looks, int patch_size);
    void write(const PatchPair& pair);
    // Writes pairs_index.json and split_manifest.json; returns records written.
    std::size_t finish(const SplitManifest& manifest);

    static constexpr const char* kRecordFile = "pairs.bin";
    static constexpr const char* kIndexFile = "pairs_index.json";
    static constexpr const char* kManifestFile = "split_manifest.json";

private:
    std::filesystem::path dir_;
    int looks_;
    int patch_size_;
    std::ofstream records_;
    nlohmann::json index_ = nlohmann::json::array();
};

std::vector<PatchPair> read_pairs(const std::filesystem::path& dir);

}  // namespace sarsub

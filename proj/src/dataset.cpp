#include "sarsub/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "detail/le.hpp"
#include "sarsub/error.hpp"

namespace sarsub {

const char* to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "validation") return Split::validation;
    if (s == "test") return Split::test;
    fail(ErrorKind::validation, "unknown split '" + s + "'");
}

Split SplitManifest::split_of(const std::string& scene_id) const {
    auto it = assignments.find(scene_id);
    if (it == assignments.end()) fail(ErrorKind::validation, "scene '" + scene_id + "' missing from split manifest");
    return it->second;
}

void SplitManifest::validate() const {
    require(patch_size > 0, "patch size must be positive");
    for (const auto& [id, split] : assignments) require(!id.empty(), "empty scene id in split manifest");
}

void to_json(nlohmann::json& j, const SplitManifest& m) {
    nlohmann::json assignments = nlohmann::json::object(), counts = nlohmann::json::object();
    for (const auto& [id, s] : m.assignments) assignments[id] = to_string(s);
    for (const auto& [s, c] : m.counts) counts[to_string(s)] = c;
    j = nlohmann::json{{"assignments", assignments}, {"patch_size", m.patch_size}, {"counts", counts}};
}

void from_json(const nlohmann::json& j, SplitManifest& m) {
    m = SplitManifest{};
    // A JSON object cannot hold a scene id twice, so each scene lands in exactly one split.
    for (const auto& [id, s] : j.at("assignments").items()) m.assignments[id] = parse_split(s.get<std::string>());
    m.patch_size = j.value("patch_size", 96);
    const auto counts_json = j.value("counts", nlohmann::json::object());
    for (const auto& [s, c] : counts_json.items())
        m.counts[parse_split(s)] = c.get<std::size_t>();
}

std::vector<PatchPair> extract_pairs(const IntensityRaster& full, std::span<const IntensityRaster> looks,
                                     const SplitManifest& manifest, const std::string& scene_id) {
    manifest.validate();
    const Split split = manifest.split_of(scene_id);
    require(!looks.empty(), "extract_pairs needs at least one look");
    full.require_state(RadiometricState::normalized_unit, "extract_pairs");
    for (const auto& l : looks) {
        l.require_state(RadiometricState::normalized_unit, "extract_pairs");
        if (!l.same_grid(full)) fail(ErrorKind::validation, "look grid does not match full-aperture grid");
    }
    const int p = manifest.patch_size;
    const int rows = full.height() / p, cols = full.width() / p;
    const int tiles = rows * cols;

    auto tile_valid = [&](const IntensityRaster& r, int ty, int tx) {
        if (r.nodata.empty()) return true;
        for (int y = ty * p; y < (ty + 1) * p; ++y)
            for (int x = tx * p; x < (tx + 1) * p; ++x)
                if (r.nodata[std::size_t(y) * std::size_t(r.width()) + std::size_t(x)]) return false;
        return true;
    };

    std::vector<std::uint8_t> keep(std::size_t(tiles), 0);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < tiles; ++t) {
        const int ty = t / cols, tx = t % cols;
        bool ok = tile_valid(full, ty, tx);
        for (const auto& l : looks) ok = ok && tile_valid(l, ty, tx);
        keep[std::size_t(t)] = ok ? 1 : 0;
    }

    std::vector<PatchPair> pairs;
    for (int t = 0; t < tiles; ++t) {
        if (!keep[std::size_t(t)]) continue;
        const Rect r{(t / cols) * p, (t % cols) * p, p, p};
        PatchPair pair;
        for (const auto& l : looks) pair.inputs.push_back(crop(l.plane, r));
        pair.target = crop(full.plane, r);
        pair.scene_id = scene_id;
        pair.polarization = full.polarization;
        pair.origin_az = r.az;
        pair.origin_rg = r.rg;
        pair.split = split;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

namespace {

// Cumulative fractions C[0..levels] of a level histogram over [0, 1].
struct LevelCdf {
    std::vector<double> cumulative;
    std::vector<double> density;  // fraction per level
    int levels = 0;

    LevelCdf(const Plane& p, int l) : cumulative(std::size_t(l) + 1, 0.0), density(std::size_t(l), 0.0), levels(l) {
        std::vector<std::uint64_t> counts(std::size_t(l), 0);
        for (double v : p.data) ++counts[level_of(v)];
        const double n = double(p.size());
        std::uint64_t running = 0;
        for (int b = 0; b < l; ++b) {
            density[std::size_t(b)] = double(counts[std::size_t(b)]) / n;
            running += counts[std::size_t(b)];
            cumulative[std::size_t(b) + 1] = double(running) / n;
        }
        cumulative.back() = 1.0;
    }

    std::size_t level_of(double v) const {
        const double x = std::clamp(v, 0.0, 1.0) * double(levels);
        return std::min(std::size_t(x), std::size_t(levels) - 1);
    }

    double cdf(double v) const {
        const std::size_t b = level_of(v);
        const double frac = std::clamp(v, 0.0, 1.0) * double(levels) - double(b);
        return cumulative[b] + frac * density[b];
    }

    // Right end of the set {u : cdf(u) = t}.
    double inverse(double t) const {
        const auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), t);
        if (it == cumulative.end()) return 1.0;
        const std::size_t b = std::size_t(it - cumulative.begin()) - 1;
        const double frac = (t - cumulative[b]) / density[b];
        return (double(b) + std::clamp(frac, 0.0, 1.0)) / double(levels);
    }
};

}  // namespace

Plane histogram_match(const Plane& source, const Plane& reference, int levels) {
    require(source.same_grid(reference), "histogram_match needs same-size patches");
    require(levels >= 64, "histogram_match needs at least 64 levels");
    require(source.size() > 0, "histogram_match on empty patch");
    const auto [rmin_it, rmax_it] = std::minmax_element(reference.data.begin(), reference.data.end());
    const double rmin = *rmin_it, rmax = *rmax_it;
    Plane out(source.height, source.width);
    if (rmax == rmin) {
        std::fill(out.data.begin(), out.data.end(), rmin);
        return out;
    }
    const LevelCdf src(source, levels), ref(reference, levels);
    const std::size_t n = source.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        out.data[i] = std::clamp(ref.inverse(src.cdf(source.data[i])), rmin, rmax);
    return out;
}

namespace {

Plane rotate_ccw(const Plane& p) {
    Plane out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(p.width - 1 - x, y) = p.at(y, x);
    return out;
}

Plane flip_horizontal(const Plane& p) {
    Plane out(p.height, p.width);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(y, p.width - 1 - x) = p.at(y, x);
    return out;
}

}  // namespace

Plane dihedral(const Plane& p, int element) {
    require(element >= 0 && element < 8, "dihedral element must be in 0..7");
    Plane out = element >= 4 ? flip_horizontal(p) : p;
    for (int r = 0; r < element % 4; ++r) out = rotate_ccw(out);
    return out;
}

int dihedral_inverse(int element) {
    require(element >= 0 && element < 8, "dihedral element must be in 0..7");
    // reflections are involutions; rotations invert to the opposite turn
    return element >= 4 ? element : (4 - element) % 4;
}

PatchPair dihedral_augment(const PatchPair& pair, int element) {
    PatchPair out = pair;
    for (auto& in : out.inputs) in = dihedral(in, element);
    out.target = dihedral(pair.target, element);
    return out;
}

InputSampler::InputSampler(InputMode mode, int looks, std::uint64_t seed) : mode_(mode), looks_(looks), rng_(seed) {
    require(looks >= 1, "sampler needs at least one look");
}

std::vector<int> InputSampler::next() {
    if (mode_ == InputMode::si) return {int(rng_.below(std::uint64_t(looks_)))};
    std::vector<int> perm(static_cast<std::size_t>(looks_));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = looks_ - 1; i > 0; --i)
        std::swap(perm[std::size_t(i)], perm[rng_.below(std::uint64_t(i) + 1)]);
    return perm;
}

PairWriter::PairWriter(const std::filesystem::path& dir, int looks, int patch_size)
    : dir_(dir), looks_(looks), patch_size_(patch_size) {
    require(looks >= 1 && patch_size > 0, "invalid pair writer geometry");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    records_.open(dir / kRecordFile, std::ios::binary | std::ios::trunc);
    if (!records_) fail(ErrorKind::io, "cannot open " + (dir / kRecordFile).string());
}

void PairWriter::write(const PatchPair& pair) {
    require(int(pair.inputs.size()) == looks_, "pair has wrong number of inputs");
    const std::size_t plane = std::size_t(patch_size_) * std::size_t(patch_size_);
    std::vector<char> buf((std::size_t(looks_) + 1) * plane * 4);
    std::size_t off = 0;
    auto put = [&](const Plane& p) {
        require(p.height == patch_size_ && p.width == patch_size_, "patch has wrong size");
        for (double v : p.data) {
            detail::put_f32(&buf[off], float(v));
            off += 4;
        }
    };
    for (const auto& in : pair.inputs) put(in);
    put(pair.target);
    records_.write(buf.data(), std::streamsize(buf.size()));
    if (!records_) fail(ErrorKind::io, "failed writing pair record");
    index_.push_back({{"record", index_.size()},
                      {"scene_id", pair.scene_id},
                      {"polarization", to_string(pair.polarization)},
                      {"origin", {pair.origin_az, pair.origin_rg}},
                      {"split", to_string(pair.split)}});
}

std::size_t PairWriter::finish(const SplitManifest& manifest) {
    records_.close();
    const std::size_t record_bytes = (std::size_t(looks_) + 1) * std::size_t(patch_size_) * std::size_t(patch_size_) * 4;
    const nlohmann::json index{{"format", "sarsub-pairs-1"},
                               {"looks", looks_},
                               {"patch_size", patch_size_},
                               {"dtype", "f32le"},
                               {"record_bytes", record_bytes},
                               {"records", index_}};
    std::ofstream(dir_ / kIndexFile) << index.dump(1) << '\n';
    std::ofstream(dir_ / kManifestFile) << nlohmann::json(manifest).dump(1) << '\n';
    return index_.size();
}

std::vector<PatchPair> read_pairs(const std::filesystem::path& dir) {
    std::ifstream idx_in(dir / PairWriter::kIndexFile);
    if (!idx_in) fail(ErrorKind::io, "cannot open " + (dir / PairWriter::kIndexFile).string());
    nlohmann::json index;
    try {
        idx_in >> index;
    } catch (const std::exception& e) {
        fail(ErrorKind::malformed_header, std::string("pair index: ") + e.what());
    }
    const int looks = index.at("looks").get<int>();
    const int p = index.at("patch_size").get<int>();
    const std::size_t plane = std::size_t(p) * std::size_t(p);
    std::ifstream rec(dir / PairWriter::kRecordFile, std::ios::binary);
    if (!rec) fail(ErrorKind::io, "cannot open " + (dir / PairWriter::kRecordFile).string());
    std::vector<char> buf((std::size_t(looks) + 1) * plane * 4);
    std::vector<PatchPair> out;
    for (const auto& r : index.at("records")) {
        rec.read(buf.data(), std::streamsize(buf.size()));
        if (rec.gcount() != std::streamsize(buf.size())) fail(ErrorKind::truncated, "pair record file truncated");
        PatchPair pair;
        std::size_t off = 0;
        auto get = [&]() {
            Plane q(p, p);
            for (auto& v : q.data) {
                v = detail::get_f32(&buf[off]);
                off += 4;
            }
            return q;
        };
        for (int k = 0; k < looks; ++k) pair.inputs.push_back(get());
        pair.target = get();
        pair.scene_id = r.at("scene_id").get<std::string>();
        pair.polarization = parse_polarization(r.at("polarization").get<std::string>());
        pair.origin_az = r.at("origin").at(0).get<int>();
        pair.origin_rg = r.at("origin").at(1).get<int>();
        pair.split = parse_split(r.at("split").get<std::string>());
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace sarsub

#include "sarsub/grdf.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "detail/le.hpp"
#include "sarsub/error.hpp"

namespace sarsub {
namespace {

std::size_t mask_row_bytes(int width) { return (std::size_t(width) + 7) / 8; }

nlohmann::json base_header(GrdfDtype dtype, int h, int w, const std::string& scene_id, Polarization pol,
                           const nlohmann::json& sidecars) {
    return nlohmann::json{{"magic", kGrdfMagic},
                          {"version", 1},
                          {"dtype", dtype == GrdfDtype::c64 ? "c64" : "f32"},
                          {"height_az", h},
                          {"width_rg", w},
                          {"scene_id", scene_id},
                          {"polarization", to_string(pol)},
                          {"sidecars", sidecars.is_null() ? nlohmann::json::object() : sidecars}};
}

void write_file(const std::filesystem::path& path, const nlohmann::json& header, const std::vector<char>& payload) {
    const std::string text = header.dump();
    std::vector<char> preamble(kGrdfPreambleBytes, 0);
    std::memcpy(preamble.data(), kGrdfMagic, 5);
    detail::put_u64(&preamble[8], text.size());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(preamble.data(), std::streamsize(preamble.size()));
    out.write(text.data(), std::streamsize(text.size()));
    out.write(payload.data(), std::streamsize(payload.size()));
    if (!out) fail(ErrorKind::io, "failed writing '" + path.string() + "'");
}

struct RawFile {
    nlohmann::json header;
    std::vector<char> payload;
    std::vector<char> mask;
};

GrdfDtype parse_dtype(const nlohmann::json& header, const std::filesystem::path& path) {
    const auto it = header.find("dtype");
    if (it == header.end() || !it->is_string())
        fail(ErrorKind::malformed_header, "'" + path.string() + "': header has no dtype");
    const auto s = it->get<std::string>();
    if (s == "c64") return GrdfDtype::c64;
    if (s == "f32") return GrdfDtype::f32;
    fail(ErrorKind::unknown_dtype, "'" + path.string() + "': unknown dtype '" + s + "' (expected c64 or f32)");
}

nlohmann::json parse_header(std::ifstream& in, const std::filesystem::path& path, std::uintmax_t file_size) {
    char preamble[kGrdfPreambleBytes];
    in.read(preamble, std::streamsize(kGrdfPreambleBytes));
    const auto got = std::size_t(in.gcount());
    const std::size_t cmp = std::min<std::size_t>(got, 8);
    const char expected[8] = {'G', 'R', 'D', 'F', '1', 0, 0, 0};
    if (std::memcmp(preamble, expected, cmp) != 0)
        fail(ErrorKind::bad_magic, "'" + path.string() + "': not a GRDF1 file (bad magic)");
    if (got < kGrdfPreambleBytes)
        fail(ErrorKind::truncated, "'" + path.string() + "': truncated preamble: expected " +
                                       std::to_string(kGrdfPreambleBytes) + " bytes, got " + std::to_string(got));
    const std::uint64_t header_len = detail::get_u64(&preamble[8]);
    if (header_len > file_size - kGrdfPreambleBytes)
        fail(ErrorKind::truncated, "'" + path.string() + "': truncated header: expected " +
                                       std::to_string(header_len) + " bytes, got " +
                                       std::to_string(file_size - kGrdfPreambleBytes));
    std::string text(header_len, '\0');
    in.read(text.data(), std::streamsize(header_len));
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::malformed_header, "'" + path.string() + "': header is not valid JSON: " + e.what());
    }
    if (!header.is_object()) fail(ErrorKind::malformed_header, "'" + path.string() + "': header is not an object");
    if (header.value("magic", std::string()) != kGrdfMagic)
        fail(ErrorKind::bad_magic, "'" + path.string() + "': header magic is not GRDF1");
    return header;
}

RawFile read_raw(const std::filesystem::path& path) {
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec) fail(ErrorKind::io, "cannot stat '" + path.string() + "': " + ec.message());
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");

    RawFile raw;
    raw.header = parse_header(in, path, file_size);
    const GrdfDtype dtype = parse_dtype(raw.header, path);
    int h = 0, w = 0;
    try {
        h = raw.header.at("height_az").get<int>();
        w = raw.header.at("width_rg").get<int>();
    } catch (const std::exception&) {
        fail(ErrorKind::malformed_header, "'" + path.string() + "': header lacks integer height_az/width_rg");
    }
    if (h <= 0 || w <= 0) fail(ErrorKind::malformed_header, "'" + path.string() + "': non-positive dimensions");
    const bool has_mask = raw.header.value("mask", false);

    const std::size_t sample_bytes = dtype == GrdfDtype::c64 ? 8 : 4;
    const std::size_t payload_bytes = std::size_t(h) * std::size_t(w) * sample_bytes;
    const std::size_t mask_bytes = has_mask ? std::size_t(h) * mask_row_bytes(w) : 0;
    const std::size_t offset = std::size_t(in.tellg());
    const std::size_t expected = offset + payload_bytes + mask_bytes;
    if (file_size < expected)
        fail(ErrorKind::truncated, "'" + path.string() + "': truncated payload: expected " +
                                       std::to_string(payload_bytes + mask_bytes) + " bytes, got " +
                                       std::to_string(file_size - offset));
    if (file_size > expected)
        fail(ErrorKind::trailing_data, "'" + path.string() + "': " + std::to_string(file_size - expected) +
                                           " unexpected bytes after payload");
    raw.payload.resize(payload_bytes);
    in.read(raw.payload.data(), std::streamsize(payload_bytes));
    raw.mask.resize(mask_bytes);
    if (mask_bytes) in.read(raw.mask.data(), std::streamsize(mask_bytes));
    if (!in) fail(ErrorKind::io, "failed reading '" + path.string() + "'");
    return raw;
}

template <class T>
T header_get(const nlohmann::json& h, const char* key, T fallback, const std::filesystem::path& path) {
    try {
        return h.contains(key) ? h.at(key).get<T>() : fallback;
    } catch (const std::exception&) {
        fail(ErrorKind::malformed_header, "'" + path.string() + "': bad header field '" + key + "'");
    }
}

}  // namespace

void write_grdf(const ComplexRaster& r, const std::filesystem::path& path, const nlohmann::json& sidecars) {
    require(r.data.size() == std::size_t(r.height) * std::size_t(r.width), "complex raster data length mismatch");
    auto header = base_header(GrdfDtype::c64, r.height, r.width, r.scene_id, r.polarization, sidecars);
    header["radar"] = r.params;
    header["azimuth_weighting_applied"] = r.azimuth_weighting_applied;
    header["mask"] = false;
    std::vector<char> payload(r.data.size() * 8);
    for (std::size_t i = 0; i < r.data.size(); ++i) {
        detail::put_f32(&payload[8 * i], float(r.data[i].real()));
        detail::put_f32(&payload[8 * i + 4], float(r.data[i].imag()));
    }
    write_file(path, header, payload);
}

void write_grdf(const IntensityRaster& r, const std::filesystem::path& path, const nlohmann::json& sidecars) {
    require(r.plane.data.size() == std::size_t(r.height()) * std::size_t(r.width()), "raster data length mismatch");
    auto header = base_header(GrdfDtype::f32, r.height(), r.width(), r.scene_id, r.polarization, sidecars);
    header["radiometric_state"] = to_string(r.state);
    header["clip_bounds"] = r.clip_bounds ? nlohmann::json{{"low_db", r.clip_bounds->low_db},
                                                            {"high_db", r.clip_bounds->high_db}}
                                          : nlohmann::json(nullptr);
    const bool has_mask = r.has_mask();
    header["mask"] = has_mask;
    const std::size_t n = r.plane.size();
    const std::size_t row_bytes = mask_row_bytes(r.width());
    std::vector<char> payload(n * 4 + (has_mask ? std::size_t(r.height()) * row_bytes : 0), 0);
    for (std::size_t i = 0; i < n; ++i) detail::put_f32(&payload[4 * i], float(r.plane.data[i]));
    if (has_mask) {
        char* mask = &payload[n * 4];
        for (int y = 0; y < r.height(); ++y)
            for (int x = 0; x < r.width(); ++x)
                if (r.nodata[std::size_t(y) * std::size_t(r.width()) + std::size_t(x)])
                    mask[std::size_t(y) * row_bytes + std::size_t(x) / 8] |= char(1u << (x % 8));
    }
    write_file(path, header, payload);
}

GrdfFile read_grdf(const std::filesystem::path& path) {
    RawFile raw = read_raw(path);
    const auto& h = raw.header;
    const GrdfDtype dtype = parse_dtype(h, path);
    const int height = h.at("height_az").get<int>(), width = h.at("width_rg").get<int>();
    const auto scene_id = header_get<std::string>(h, "scene_id", "", path);
    Polarization pol = Polarization::VV;
    try {
        pol = parse_polarization(header_get<std::string>(h, "polarization", "VV", path));
    } catch (const Error& e) {
        fail(ErrorKind::malformed_header, "'" + path.string() + "': " + e.what());
    }

    GrdfFile file;
    file.sidecars = h.contains("sidecars") ? h.at("sidecars") : nlohmann::json::object();
    if (dtype == GrdfDtype::c64) {
        ComplexRaster r(height, width, header_get<RadarParams>(h, "radar", RadarParams{}, path));
        r.azimuth_weighting_applied = header_get<bool>(h, "azimuth_weighting_applied", false, path);
        r.scene_id = scene_id;
        r.polarization = pol;
        for (std::size_t i = 0; i < r.data.size(); ++i)
            r.data[i] = {detail::get_f32(&raw.payload[8 * i]), detail::get_f32(&raw.payload[8 * i + 4])};
        file.raster = std::move(r);
        return file;
    }

    IntensityRaster r;
    r.plane = Plane(height, width);
    r.scene_id = scene_id;
    r.polarization = pol;
    try {
        r.state = parse_radiometric_state(header_get<std::string>(h, "radiometric_state", "linear_power", path));
    } catch (const Error& e) {
        fail(ErrorKind::malformed_header, "'" + path.string() + "': " + e.what());
    }
    if (h.contains("clip_bounds") && !h.at("clip_bounds").is_null()) {
        const auto& cb = h.at("clip_bounds");
        r.clip_bounds = ClipBounds{header_get<double>(cb, "low_db", 0.0, path), header_get<double>(cb, "high_db", 0.0, path)};
    }
    for (std::size_t i = 0; i < r.plane.size(); ++i) r.plane.data[i] = detail::get_f32(&raw.payload[4 * i]);
    if (!raw.mask.empty()) {
        const std::size_t row_bytes = mask_row_bytes(width);
        r.nodata.assign(r.plane.size(), 0);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                r.nodata[std::size_t(y) * std::size_t(width) + std::size_t(x)] =
                    (std::uint8_t(raw.mask[std::size_t(y) * row_bytes + std::size_t(x) / 8]) >> (x % 8)) & 1u;
    }
    file.raster = std::move(r);
    return file;
}

ComplexRaster read_complex_grdf(const std::filesystem::path& path) {
    auto f = read_grdf(path);
    if (!f.is_complex()) fail(ErrorKind::validation, "'" + path.string() + "' is not a complex (c64) raster");
    return std::get<ComplexRaster>(std::move(f.raster));
}

IntensityRaster read_intensity_grdf(const std::filesystem::path& path) {
    auto f = read_grdf(path);
    if (f.is_complex()) fail(ErrorKind::validation, "'" + path.string() + "' is not an intensity (f32) raster");
    return std::get<IntensityRaster>(std::move(f.raster));
}

nlohmann::json read_grdf_header(const std::filesystem::path& path) {
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec) fail(ErrorKind::io, "cannot stat '" + path.string() + "': " + ec.message());
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    return parse_header(in, path, file_size);
}

}  // namespace sarsub

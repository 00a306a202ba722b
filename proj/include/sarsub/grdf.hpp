#pragma once

#include <filesystem>
#include <variant>

#include "sarsub/raster.hpp"

namespace sarsub {

// GRDF raster file (see docs/grdf.md for the byte layout):
//   [0, 8)        preamble "GRDF1\0\0\0"
//   [8, 16)       uint64 LE length H of the JSON header
//   [16, 16 + H)  UTF-8 JSON header
//   payload       row-major little-endian float32 samples (c64: re, im interleaved)
//   mask          optional, 1 bit per pixel LSB-first, each row padded to a whole byte
inline constexpr char kGrdfMagic[] = "GRDF1";
inline constexpr std::size_t kGrdfPreambleBytes = 16;

enum class GrdfDtype { c64, f32 };

struct GrdfFile {
    std::variant<ComplexRaster, IntensityRaster> raster;
    nlohmann::json sidecars = nlohmann::json::object();

    bool is_complex() const { return std::holds_alternative<ComplexRaster>(raster); }
};

// Samples are stored as float32; doubles are rounded to nearest on write.
void write_grdf(const ComplexRaster& r, const std::filesystem::path& path,
                const nlohmann::json& sidecars = nlohmann::json::object());
void write_grdf(const IntensityRaster& r, const std::filesystem::path& path,
                const nlohmann::json& sidecars = nlohmann::json::object());

GrdfFile read_grdf(const std::filesystem::path& path);
ComplexRaster read_complex_grdf(const std::filesystem::path& path);
IntensityRaster read_intensity_grdf(const std::filesystem::path& path);

// Header only; the payload is not touched.
nlohmann::json read_grdf_header(const std::filesystem::path& path);

}  // namespace sarsub

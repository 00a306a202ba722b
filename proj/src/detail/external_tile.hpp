#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "sarsub/enhance.hpp"

namespace sarsub::detail {

// Writes the tile inputs into `dir`, runs the command and returns the output plane.
Plane run_external_tile(const ExternalCommand& cmd, std::span<const Plane> tiles,
                        const std::optional<ClipBounds>& bounds, const std::filesystem::path& dir);

std::filesystem::path make_work_dir(const ExternalCommand& cmd);

}  // namespace sarsub::detail

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarsub/error.hpp"
#include "sarsub/raster.hpp"

namespace sarsub {

enum class EnhancerKind { identity, subap_multilook, lee_filter, boxcar, external };
enum class Arity { si, mf };

const char* to_string(EnhancerKind k);
EnhancerKind parse_enhancer_kind(const std::string& s);

// External enhancer protocol: the template's {inputs} placeholder expands to the
// space-separated input GRDF paths ({input0}, {input1}, ... address them one by
// one) and {output} to the GRDF path the command must write. Exit code 0 means
// success; anything else is a failure.
struct ExternalCommand {
    std::string command_template;
    std::filesystem::path workdir;  // empty: a fresh directory under the system temp dir
    std::chrono::seconds timeout{300};
};

struct EnhancerBinding {
    EnhancerKind kind = EnhancerKind::identity;
    Arity arity = Arity::si;
    int looks = 3;          // inputs consumed in MF arity
    int window = 7;         // lee_filter / boxcar window (odd)
    double noise_cv = 1.0;  // lee_filter speckle coefficient of variation
    std::optional<ExternalCommand> external;

    int input_count() const { return arity == Arity::si ? 1 : looks; }
    void validate() const;
};

void to_json(nlohmann::json& j, const EnhancerBinding& b);
void from_json(const nlohmann::json& j, EnhancerBinding& b);

struct TilingPlan {
    int tile_size = 96;
    double overlap = 0.5;

    int stride() const;
    void validate() const;
};

// Sliding-window inference: overlapping tiles over a reflection-padded grid,
// blended with a separable Hann window whose per-pixel weights are normalized to 1.
IntensityRaster enhance_tiled(std::span<const IntensityRaster> inputs, const EnhancerBinding& binding,
                              const TilingPlan& plan);

// Applies the enhancer to one set of co-located tiles (no tiling).
Plane apply_enhancer(const EnhancerBinding& binding, std::span<const Plane> tiles,
                     const std::optional<ClipBounds>& bounds);

// Local-statistics Lee filter, out = mean + k (in - mean), k = max(0, 1 - cv_n^2 / cv_local^2).
Plane lee_filter(const Plane& in, int window, double noise_cv);
Plane boxcar_filter(const Plane& in, int window);

// Average of co-registered looks; in linear power when clip bounds are known.
Plane multilook(std::span<const Plane> looks, const std::optional<ClipBounds>& bounds);

class RefinementError : public Error {
public:
    RefinementError(const Error& cause, std::vector<IntensityRaster> completed);
    const std::vector<IntensityRaster>& completed_stages() const { return completed_; }
    ErrorKind cause_kind() const { return kind(); }

private:
    std::vector<IntensityRaster> completed_;
};

inline constexpr int kMaxRefinementPasses = 8;

// Stage 0 runs binding_init on the initial inputs; stage t feeds stage t-1 back
// through the SI enhancer. Returns every stage.
std::vector<IntensityRaster> iterate_refine(std::span<const IntensityRaster> initial_inputs,
                                            const EnhancerBinding& binding_init, const EnhancerBinding& binding_si,
                                            int passes, const TilingPlan& plan,
                                            int max_passes = kMaxRefinementPasses);

// Runs the external command on GRDF inputs and returns the validated output raster
// (grid match, finite, within [0, 1] up to 1e-3, then clamped).
IntensityRaster run_external(const ExternalCommand& cmd, std::span<const std::filesystem::path> inputs,
                             const std::filesystem::path& output, int height, int width);

std::string expand_command(const std::string& tmpl, std::span<const std::filesystem::path> inputs,
                           const std::filesystem::path& output);

namespace serial {
Plane lee_filter(const Plane& in, int window, double noise_cv);
Plane boxcar_filter(const Plane& in, int window);
IntensityRaster enhance_tiled(std::span<const IntensityRaster> inputs, const EnhancerBinding& binding,
                              const TilingPlan& plan);
}  // namespace serial

}  // namespace sarsub

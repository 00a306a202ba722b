#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sarsub/dataset.hpp"
#include "sarsub/enhance.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/report.hpp"
#include "sarsub/slc_sim.hpp"

namespace sarsub {

// A scene is either simulated from a SceneSpec or ingested from a complex GRDF.
struct SceneEntry {
    std::string id;
    Polarization polarization = Polarization::VV;
    Split split = Split::test;
    std::optional<SceneSpec> spec;
    std::filesystem::path slc_path;
};

struct PipelineConfig {
    int looks = 3;
    RadarParams radar;
    double clip_low = 0.1;
    double clip_high = 99.9;
    int patch_size = 96;
    bool histogram_match = false;
    TilingPlan tiling;
    int passes = 4;
    std::uint64_t seed = 0;
    EnhancerBinding si_enhancer = binding(EnhancerKind::lee_filter, Arity::si);
    std::optional<EnhancerBinding> mf_enhancer = binding(EnhancerKind::subap_multilook, Arity::mf);
    // "clean": simulated reflectivity where available, else the full-aperture image.
    // "full_aperture": always the full-aperture image.
    std::string reference = "clean";
    std::filesystem::path rois_path;  // required for ENL on ingested scenes
    EvalOptions eval;
    std::filesystem::path out_dir = "run";
    std::vector<SceneEntry> scenes;

    void validate() const;

    static EnhancerBinding binding(EnhancerKind kind, Arity arity) {
        EnhancerBinding b;
        b.kind = kind;
        b.arity = arity;
        return b;
    }
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
// Relative paths inside the document are resolved against `base_dir` by load_pipeline_config.
void from_json(const nlohmann::json& j, PipelineConfig& c);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineResult {
    std::filesystem::path run_dir;
    EvalReport report;
};

// simulate / ingest -> decompose -> preprocess -> pairs -> enhance + refine -> evaluate.
// A failing stage throws an Error whose message starts with "stage '<name>'".
PipelineResult run_pipeline(const PipelineConfig& config);

inline constexpr const char* kRunLayoutVersion = "sarsub-run-1";

}  // namespace sarsub

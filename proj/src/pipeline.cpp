#include "sarsub/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "sarsub/grdf.hpp"
#include "sarsub/parallel.hpp"
#include "sarsub/subaperture.hpp"

namespace sarsub {

void PipelineConfig::validate() const {
    require(looks >= 2, "looks must be at least 2");
    radar.validate();
    require(clip_low >= 0.0 && clip_low < clip_high && clip_high <= 100.0, "clip percentiles must satisfy 0 <= low < high <= 100");
    require(patch_size >= 8, "patch size must be >= 8");
    tiling.validate();
    require(passes >= 0 && passes <= kMaxRefinementPasses,
            "passes must lie in [0, " + std::to_string(kMaxRefinementPasses) + "]");
    si_enhancer.validate();
    require(si_enhancer.arity == Arity::si, "si_enhancer must have SI arity");
    if (mf_enhancer) {
        mf_enhancer->validate();
        require(mf_enhancer->arity == Arity::mf && mf_enhancer->looks == looks,
                "mf_enhancer must have MF arity over all looks");
    }
    require(reference == "clean" || reference == "full_aperture", "reference must be clean or full_aperture");
    require(!scenes.empty(), "pipeline needs at least one scene");
    std::map<std::string, Split> splits;
    std::set<std::pair<std::string, Polarization>> seen;
    bool any_test = false;
    for (const auto& s : scenes) {
        require(!s.id.empty(), "scene id must not be empty");
        require(s.spec.has_value() != !s.slc_path.empty(), "scene '" + s.id + "' needs exactly one of spec or slc");
        if (s.spec) s.spec->validate();
        if (!seen.insert({s.id, s.polarization}).second)
            fail(ErrorKind::validation, "scene '" + s.id + "' listed twice for " + to_string(s.polarization));
        auto [it, fresh] = splits.emplace(s.id, s.split);
        if (!fresh && it->second != s.split)
            fail(ErrorKind::validation, "scene '" + s.id + "' assigned to two splits");
        any_test |= s.split == Split::test;
    }
    require(any_test, "at least one scene must be in the test split");
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
    nlohmann::json scenes = nlohmann::json::array();
    for (const auto& s : c.scenes) {
        nlohmann::json e{{"id", s.id}, {"polarization", to_string(s.polarization)}, {"split", to_string(s.split)}};
        if (s.spec) e["spec"] = *s.spec;
        if (!s.slc_path.empty()) e["slc"] = s.slc_path.string();
        scenes.push_back(e);
    }
    j = {{"looks", c.looks},
         {"radar", c.radar},
         {"clip", {{"low", c.clip_low}, {"high", c.clip_high}}},
         {"patch_size", c.patch_size},
         {"histogram_match", c.histogram_match},
         {"tiling", {{"tile_size", c.tiling.tile_size}, {"overlap", c.tiling.overlap}}},
         {"passes", c.passes},
         {"seed", c.seed},
         {"si_enhancer", c.si_enhancer},
         {"mf_enhancer", c.mf_enhancer ? nlohmann::json(*c.mf_enhancer) : nlohmann::json(nullptr)},
         {"reference", c.reference},
         {"rois", c.rois_path.string()},
         {"evaluation", {{"kde_grid_points", c.eval.kde_grid_points}, {"kde_max_samples", c.eval.kde_max_samples}}},
         {"out_dir", c.out_dir.string()},
         {"scenes", scenes}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
    c = PipelineConfig{};
    c.looks = j.value("looks", c.looks);
    if (j.contains("radar")) c.radar = j.at("radar").get<RadarParams>();
    if (j.contains("clip")) {
        c.clip_low = j.at("clip").value("low", c.clip_low);
        c.clip_high = j.at("clip").value("high", c.clip_high);
    }
    c.patch_size = j.value("patch_size", c.patch_size);
    c.histogram_match = j.value("histogram_match", c.histogram_match);
    if (j.contains("tiling")) {
        c.tiling.tile_size = j.at("tiling").value("tile_size", c.tiling.tile_size);
        c.tiling.overlap = j.at("tiling").value("overlap", c.tiling.overlap);
    }
    c.passes = j.value("passes", c.passes);
    c.seed = j.value("seed", c.seed);
    if (j.contains("si_enhancer")) c.si_enhancer = j.at("si_enhancer").get<EnhancerBinding>();
    if (j.contains("mf_enhancer")) {
        if (j.at("mf_enhancer").is_null())
            c.mf_enhancer.reset();
        else
            c.mf_enhancer = j.at("mf_enhancer").get<EnhancerBinding>();
    }
    if (c.mf_enhancer) c.mf_enhancer->looks = c.looks;
    c.reference = j.value("reference", c.reference);
    c.rois_path = j.value("rois", std::string());
    if (j.contains("evaluation")) {
        c.eval.kde_grid_points = j.at("evaluation").value("kde_grid_points", c.eval.kde_grid_points);
        c.eval.kde_max_samples = j.at("evaluation").value("kde_max_samples", c.eval.kde_max_samples);
    }
    c.out_dir = j.value("out_dir", c.out_dir.string());
    for (const auto& e : j.value("scenes", nlohmann::json::array())) {
        SceneEntry s;
        s.id = e.at("id").get<std::string>();
        s.polarization = parse_polarization(e.value("polarization", std::string("VV")));
        s.split = parse_split(e.value("split", std::string("test")));
        if (e.contains("spec")) s.spec = e.at("spec").get<SceneSpec>();
        if (e.contains("spec_file")) {
            std::ifstream in(e.at("spec_file").get<std::string>());
            if (!in) fail(ErrorKind::io, "cannot open scene spec '" + e.at("spec_file").get<std::string>() + "'");
            s.spec = nlohmann::json::parse(in).get<SceneSpec>();
        }
        s.slc_path = e.value("slc", std::string());
        c.scenes.push_back(std::move(s));
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, "config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    const auto base = std::filesystem::absolute(path).parent_path();
    auto resolve = [&](nlohmann::json& obj, const char* key) {
        if (obj.contains(key) && obj.at(key).is_string()) {
            const std::filesystem::path p = obj.at(key).get<std::string>();
            if (!p.empty() && p.is_relative()) obj[key] = (base / p).lexically_normal().string();
        }
    };
    resolve(j, "rois");
    resolve(j, "out_dir");
    if (j.contains("scenes"))
        for (auto& s : j.at("scenes")) {
            resolve(s, "spec_file");
            resolve(s, "slc");
        }
    try {
        return j.get<PipelineConfig>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, "config '" + path.string() + "': " + e.what());
    }
}

namespace {

class RunLog {
public:
    explicit RunLog(const std::filesystem::path& path) : out_(path), start_(std::chrono::steady_clock::now()) {
        if (!out_) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    }
    void line(const std::string& msg) {
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char stamp[32];
        std::snprintf(stamp, sizeof stamp, "[%9.3f s] ", t);
        out_ << stamp << msg << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
    std::chrono::steady_clock::time_point start_;
};

template <class F>
void stage(const char* name, RunLog& log, F&& body) {
    log.line(std::string("stage ") + name + ": start");
    try {
        body();
    } catch (const Error& e) {
        log.line(std::string("stage ") + name + ": failed: " + e.what());
        throw Error(e.kind(), std::string("stage '") + name + "': " + e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        log.line(std::string("stage ") + name + ": failed: " + e.what());
        throw Error(ErrorKind::io, std::string("stage '") + name + "': " + e.what());
    } catch (const nlohmann::json::exception& e) {
        log.line(std::string("stage ") + name + ": failed: " + e.what());
        throw Error(ErrorKind::validation, std::string("stage '") + name + "': " + e.what());
    }
    log.line(std::string("stage ") + name + ": done");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

struct SceneState {
    const SceneEntry* entry = nullptr;
    std::string key;  // <id>_<pol>
    std::filesystem::path dir;
    ComplexRaster slc;
    std::optional<IntensityRaster> clean;  // linear power
    std::optional<SubapertureSpec> subspec;
    std::vector<ComplexRaster> looks;
    IntensityRaster full_db;
    std::vector<IntensityRaster> looks_db;
    IntensityRaster full_norm;
    std::vector<IntensityRaster> looks_norm;
    std::optional<IntensityRaster> reference_norm;
};

std::string method_name(const char* prefix, const EnhancerBinding& b) { return std::string(prefix) + "-" + to_string(b.kind); }

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    const auto run = config.out_dir;
    std::filesystem::create_directories(run);
    RunLog log(run / "run.log");
    log.line("layout " + std::string(kRunLayoutVersion) + ", threads " + std::to_string(num_threads()));
    write_json(run / "config.json", config);

    std::vector<SceneState> scenes;
    for (const auto& e : config.scenes) {
        SceneState s;
        s.entry = &e;
        s.key = e.id + "_" + to_string(e.polarization);
        s.dir = run / "scenes" / s.key;
        scenes.push_back(std::move(s));
    }

    stage("load", log, [&] {
        for (auto& s : scenes) {
            std::filesystem::create_directories(s.dir);
            const auto& e = *s.entry;
            if (e.spec) {
                SceneSpec spec = *e.spec;
                spec.rng_seed = substream_seed(substream_seed(config.seed, e.spec->rng_seed),
                                               std::uint64_t(e.polarization));
                auto sim = simulate_slc(spec, config.radar);
                s.slc = std::move(sim.slc);
                s.clean = std::move(sim.clean_reflectivity);
                const nlohmann::json side{{"scene_spec", *e.spec}, {"pipeline_seed", config.seed},
                                          {"effective_rng_seed", spec.rng_seed}};
                s.slc.scene_id = s.clean->scene_id = e.id;
                s.slc.polarization = s.clean->polarization = e.polarization;
                write_grdf(s.slc, s.dir / "slc.grdf", side);
                write_grdf(*s.clean, s.dir / "clean.grdf", side);
                log.line(s.key + ": simulated " + std::to_string(spec.height) + "x" + std::to_string(spec.width));
            } else {
                s.slc = read_complex_grdf(e.slc_path);
                s.slc.scene_id = e.id;
                s.slc.polarization = e.polarization;
                log.line(s.key + ": ingested " + e.slc_path.string());
            }
        }
    });

    stage("decompose", log, [&] {
        for (auto& s : scenes) {
            s.subspec = make_spec(s.slc, config.looks);
            auto set = decompose(s.slc, *s.subspec);
            const double residual = recompose_check(set, s.slc);
            set.source_id = s.key;
            nlohmann::json side{{"subaperture", *s.subspec},
                                {"recompose_residual", residual},
                                {"resolution", resolution_summary(s.slc.params, *s.subspec)}};
            write_json(s.dir / "subaperture.json", side);
            for (std::size_t k = 0; k < set.looks.size(); ++k) {
                auto look_side = side;
                look_side["look"] = k;
                write_grdf(set.looks[k], s.dir / ("look_" + std::to_string(k) + ".grdf"), look_side);
            }
            s.looks = std::move(set.looks);
            char buf[64];
            std::snprintf(buf, sizeof buf, ": recompose residual %.3e", residual);
            log.line(s.key + buf);
        }
    });

    ClipSpec clip;
    stage("preprocess", log, [&] {
        std::vector<const IntensityRaster*> all;
        for (auto& s : scenes) {
            s.full_db = to_db(to_intensity(s.slc));
            for (const auto& l : s.looks) s.looks_db.push_back(to_db(to_intensity(l)));
        }
        for (const auto& s : scenes) {
            all.push_back(&s.full_db);
            for (const auto& l : s.looks_db) all.push_back(&l);
        }
        ClipSpec spec;
        spec.low_percentile = config.clip_low;
        spec.high_percentile = config.clip_high;
        clip = fit_clip(std::span<const IntensityRaster* const>(all), spec);
        write_json(run / "clipspec.json", clip);
        for (auto& s : scenes) {
            s.full_norm = clip_and_normalize(s.full_db, clip);
            write_grdf(s.full_norm, s.dir / "full_norm.grdf");
            for (std::size_t k = 0; k < s.looks_db.size(); ++k) {
                s.looks_norm.push_back(clip_and_normalize(s.looks_db[k], clip));
                write_grdf(s.looks_norm.back(), s.dir / ("look_" + std::to_string(k) + "_norm.grdf"));
            }
            if (s.clean && config.reference == "clean") {
                s.reference_norm = clip_and_normalize(to_db(*s.clean), clip);
                write_grdf(*s.reference_norm, s.dir / "reference_norm.grdf");
            }
        }
        for (const auto& [pol, b] : clip.bounds)
            log.line(std::string("clip ") + to_string(pol) + ": [" + std::to_string(b.low_db) + ", " +
                     std::to_string(b.high_db) + "] dB");
    });

    stage("pairs", log, [&] {
        SplitManifest manifest;
        manifest.patch_size = config.patch_size;
        for (const auto& s : scenes) manifest.assignments[s.entry->id] = s.entry->split;
        PairWriter writer(run / "pairs", config.looks, config.patch_size);
        for (const auto& s : scenes) {
            auto pairs = extract_pairs(s.full_norm, s.looks_norm, manifest, s.entry->id);
            for (auto& p : pairs) {
                if (config.histogram_match)
                    for (auto& in : p.inputs) in = histogram_match(in, p.target);
                writer.write(p);
                ++manifest.counts[p.split];
            }
            log.line(s.key + ": " + std::to_string(pairs.size()) + " pairs");
        }
        writer.finish(manifest);
    });

    EvalReport report;
    report.reference = config.reference;
    std::optional<RoiSet> user_rois;
    if (!config.rois_path.empty()) {
        std::ifstream in(config.rois_path);
        if (!in) fail(ErrorKind::io, "cannot open ROI file '" + config.rois_path.string() + "'");
        user_rois = nlohmann::json::parse(in).get<RoiSet>();
        user_rois->validate();
    }

    stage("enhance+evaluate", log, [&] {
        std::filesystem::create_directories(run / "enhanced");
        for (const auto& s : scenes) {
            if (s.entry->split != Split::test) continue;
            const auto out_dir = run / "enhanced" / s.key;
            std::filesystem::create_directories(out_dir);
            std::vector<Rect> rois;
            if (user_rois) {
                user_rois->validate_bounds(s.entry->id, s.slc.height, s.slc.width);
                rois = user_rois->for_scene(s.entry->id);
                for (const auto& r : rois) report.rois.rois.push_back({s.entry->id, r});
            } else if (s.entry->spec) {
                auto auto_rois = homogeneous_rois(*s.entry->spec, s.entry->id);
                for (const auto& r : auto_rois.rois) {
                    rois.push_back(r.rect);
                    report.rois.rois.push_back(r);
                }
            }
            const IntensityRaster& ref = s.reference_norm ? *s.reference_norm : s.full_norm;
            auto eval = [&](const IntensityRaster& pred, const std::string& method, int pass) {
                return evaluate(pred, ref, rois, method, pass, config.eval, &report.warnings);
            };

            report.entries.push_back(eval(s.full_norm, "full_aperture", 0));
            {
                std::vector<EvalEntry> per_look;
                for (const auto& l : s.looks_norm) per_look.push_back(eval(l, "subaperture", 0));
                report.entries.push_back(average_entries(per_look));
            }

            // SI: each look enhanced on its own, metrics averaged over looks per pass.
            const auto si_name = method_name("SI", config.si_enhancer);
            std::vector<std::vector<EvalEntry>> si_by_pass(std::size_t(config.passes) + 1);
            for (std::size_t k = 0; k < s.looks_norm.size(); ++k) {
                const auto stages = iterate_refine(std::span<const IntensityRaster>(&s.looks_norm[k], 1),
                                                   config.si_enhancer, config.si_enhancer, config.passes,
                                                   config.tiling);
                for (std::size_t p = 0; p < stages.size(); ++p) {
                    write_grdf(stages[p], out_dir / ("si_look" + std::to_string(k) + "_pass" + std::to_string(p) + ".grdf"),
                               {{"method", si_name}, {"pass", p}, {"look", k}});
                    si_by_pass[p].push_back(eval(stages[p], si_name, int(p)));
                }
            }
            for (const auto& group : si_by_pass) report.entries.push_back(average_entries(group));

            if (config.mf_enhancer) {
                const auto mf_name = method_name("MF", *config.mf_enhancer);
                const auto stages =
                    iterate_refine(s.looks_norm, *config.mf_enhancer, config.si_enhancer, config.passes, config.tiling);
                for (std::size_t p = 0; p < stages.size(); ++p) {
                    write_grdf(stages[p], out_dir / ("mf_pass" + std::to_string(p) + ".grdf"),
                               {{"method", mf_name}, {"pass", p}});
                    report.entries.push_back(eval(stages[p], mf_name, int(p)));
                }
            }
            log.line(s.key + ": evaluated with " + std::to_string(rois.size()) + " ROIs");
        }
        report.aggregate();
        write_json(run / "report.json", report);
        write_json(run / "rois.json", report.rois);
        std::ofstream(run / "report.txt") << format_table(report);
    });

    nlohmann::json files = nlohmann::json::array();
    std::vector<std::filesystem::path> paths;
    for (const auto& f : std::filesystem::recursive_directory_iterator(run))
        if (f.is_regular_file() && f.path().filename() != "MANIFEST" && f.path().filename() != "run.log")
            paths.push_back(std::filesystem::relative(f.path(), run));
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        files.push_back({{"path", p.generic_string()}, {"bytes", std::filesystem::file_size(run / p)}});
    write_json(run / "MANIFEST", {{"layout", kRunLayoutVersion}, {"files", files}, {"log", "run.log"}});
    log.line("run complete");
    return {run, std::move(report)};
}

}  // namespace sarsub

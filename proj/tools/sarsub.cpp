#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sarsub/dataset.hpp"
#include "sarsub/enhance.hpp"
#include "sarsub/grdf.hpp"
#include "sarsub/parallel.hpp"
#include "sarsub/pipeline.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/report.hpp"
#include "sarsub/slc_sim.hpp"
#include "sarsub/subaperture.hpp"

namespace fs = std::filesystem;
using namespace sarsub;

namespace {

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void save_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

// `--config file.json` for every subcommand except `pipeline`: each key becomes
// `--key value` inserted right after the subcommand path, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    if (args.size() < 2 || args[1] == "pipeline") return args;
    std::size_t path_end = 2;
    if ((args[1] == "preprocess" || args[1] == "pairs") && args.size() > 2 && args[2].rfind("-", 0) != 0) path_end = 3;
    for (std::size_t i = path_end; i < args.size(); ++i) {
        std::string file;
        std::size_t erase = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[i + 1];
            erase = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
            erase = 1;
        } else {
            continue;
        }
        args.erase(args.begin() + long(i), args.begin() + long(i + erase));
        const auto j = load_json(file);
        if (!j.is_object()) fail(ErrorKind::validation, "config '" + file + "' must be a JSON object");
        std::vector<std::string> tokens;
        for (const auto& [key, value] : j.items()) {
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) tokens.push_back(flag);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
                tokens.insert(tokens.end(), {flag, joined});
            } else if (value.is_string()) {
                tokens.insert(tokens.end(), {flag, value.get<std::string>()});
            } else if (!value.is_null()) {
                tokens.insert(tokens.end(), {flag, value.dump()});
            }
        }
        args.insert(args.begin() + long(path_end), tokens.begin(), tokens.end());
        break;
    }
    return args;
}

IntensityRaster to_db_raster(const GrdfFile& f) {
    if (f.is_complex()) return to_db(to_intensity(std::get<ComplexRaster>(f.raster)));
    const auto& r = std::get<IntensityRaster>(f.raster);
    switch (r.state) {
    case RadiometricState::linear_power: return to_db(r);
    case RadiometricState::decibel: return r;
    case RadiometricState::normalized_unit: return denormalize(r);
    }
    return r;
}

std::vector<std::string> list_files(const nlohmann::json& manifest, const char* key) {
    const auto& arr = manifest.is_array() ? manifest : manifest.at(key);
    return arr.get<std::vector<std::string>>();
}

std::vector<IntensityRaster> read_inputs(const std::vector<std::string>& paths) {
    std::vector<IntensityRaster> out;
    for (const auto& p : paths) {
        auto r = read_intensity_grdf(p);
        if (r.state != RadiometricState::normalized_unit)
            fail(ErrorKind::validation, "'" + p + "' is " + to_string(r.state) + ", enhancers take normalized_unit rasters");
        out.push_back(std::move(r));
    }
    return out;
}

struct EnhanceArgs {
    std::vector<std::string> inputs;
    std::string enhancer = "lee";
    std::string refine_enhancer;
    std::string cmd;
    std::string workdir;
    int timeout = 300;
    int window = 7;
    double noise_cv = 1.0;
    int tile = 96;
    double overlap = 0.5;
    int passes = 0;
    std::string out_dir = ".";

    void add(CLI::App* app, bool multi_input) {
        if (multi_input)
            app->add_option("--inputs", inputs, "Input GRDF rasters (normalized)")->required()->delimiter(',');
        else
            app->add_option("--input", inputs, "Input GRDF raster (normalized)")->required()->expected(1);
        app->add_option("--enhancer", enhancer, "identity|multilook|lee|boxcar|external")->capture_default_str();
        if (multi_input)
            app->add_option("--refine-enhancer", refine_enhancer, "SI enhancer for passes >= 1 (default: --enhancer if SI, else lee)");
        app->add_option("--cmd", cmd, "External command template with {inputs}/{input0}.. and {output}");
        app->add_option("--workdir", workdir, "Work directory for external tiles");
        app->add_option("--timeout", timeout, "External timeout per tile (s)")->capture_default_str();
        app->add_option("--window", window, "Filter window (odd)")->capture_default_str();
        app->add_option("--noise-cv", noise_cv, "Lee filter speckle coefficient of variation")->capture_default_str();
        app->add_option("--tile", tile, "Tile size")->capture_default_str();
        app->add_option("--overlap", overlap, "Tile overlap fraction")->capture_default_str();
        app->add_option("--passes", passes, "Refinement passes")->capture_default_str();
        app->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    }

    EnhancerBinding binding(const std::string& kind_name, int n_inputs) const {
        EnhancerBinding b;
        b.kind = parse_enhancer_kind(kind_name);
        b.arity = (b.kind == EnhancerKind::subap_multilook || n_inputs > 1) ? Arity::mf : Arity::si;
        b.looks = n_inputs;
        b.window = window;
        b.noise_cv = noise_cv;
        if (b.kind == EnhancerKind::external) {
            ExternalCommand c;
            c.command_template = cmd;
            c.workdir = workdir;
            c.timeout = std::chrono::seconds(timeout);
            b.external = c;
        }
        return b;
    }

    void run() const {
        const auto rasters = read_inputs(inputs);
        const auto init = binding(enhancer, int(rasters.size()));
        std::string refine_name = refine_enhancer;
        if (refine_name.empty()) refine_name = init.arity == Arity::si ? enhancer : "lee";
        const auto si = binding(refine_name, 1);
        const TilingPlan plan{tile, overlap};
        const auto stages = iterate_refine(rasters, init, si, passes, plan);
        fs::create_directories(out_dir);
        for (std::size_t p = 0; p < stages.size(); ++p) {
            const auto path = fs::path(out_dir) / ("pass" + std::to_string(p) + ".grdf");
            write_grdf(stages[p], path, {{"method", to_string(init.kind)}, {"pass", p}, {"enhancer", init}, {"refine_enhancer", si}});
            std::cout << path.string() << '\n';
        }
    }
};

fs::path stem_path(const fs::path& p) { return p.filename(); }

}  // namespace

int main(int argc, char** argv) {
    try {
        apply_thread_env();
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    CLI::App app{"Azimuth subaperture pair generation and enhancer evaluation for SAR SLC data"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: SARSUB_NUM_THREADS or OpenMP default)");

    // simulate
    std::string sim_scene, sim_radar, sim_out = ".";
    std::optional<double> sim_hamming;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_id = "scene";
    std::string sim_pol = "VV";
    auto* simulate = app.add_subcommand("simulate", "Simulate an SLC scene with known clean reflectivity");
    simulate->add_option("--scene", sim_scene, "Scene JSON")->required();
    simulate->add_option("--radar", sim_radar, "Radar parameter JSON");
    simulate->add_option("--hamming", sim_hamming, "Generalized Hamming coefficient");
    simulate->add_option("--seed", sim_seed, "Override rng_seed");
    simulate->add_option("--scene-id", sim_id)->capture_default_str();
    simulate->add_option("--polarization", sim_pol)->capture_default_str();
    simulate->add_option("--out-dir", sim_out)->capture_default_str();
    simulate->add_option("--config", "JSON file whose keys expand to options");

    // decompose
    std::string dec_input, dec_out = ".";
    int dec_looks = 3;
    std::optional<double> dec_hamming;
    auto* decompose_cmd = app.add_subcommand("decompose", "Split an SLC into K azimuth subaperture looks");
    decompose_cmd->add_option("--input", dec_input, "Complex GRDF")->required();
    decompose_cmd->add_option("--looks", dec_looks)->capture_default_str();
    decompose_cmd->add_option("--hamming", dec_hamming, "Azimuth window coefficient to de-weight (1 disables)");
    decompose_cmd->add_option("--out-dir", dec_out)->capture_default_str();
    decompose_cmd->add_option("--config", "JSON file whose keys expand to options");

    // preprocess
    auto* preprocess = app.add_subcommand("preprocess", "dB conversion and percentile clipping");
    preprocess->require_subcommand(1);
    std::string fit_manifest, fit_out = "clipspec.json";
    double fit_low = 0.1, fit_high = 99.9;
    bool fit_joint = false;
    auto* fit = preprocess->add_subcommand("fit-clip", "Fit dataset-wide clip bounds");
    fit->add_option("--manifest", fit_manifest, "JSON list of GRDF rasters (or {\"rasters\": [...]})")->required();
    fit->add_option("--out", fit_out)->capture_default_str();
    fit->add_option("--low", fit_low)->capture_default_str();
    fit->add_option("--high", fit_high)->capture_default_str();
    fit->add_flag("--joint", fit_joint, "One set of bounds for all polarizations");
    fit->add_option("--config", "JSON file whose keys expand to options");
    std::string apply_clip, apply_in, apply_out;
    auto* apply = preprocess->add_subcommand("apply", "Normalize a raster with fitted clip bounds");
    apply->add_option("--clipspec", apply_clip)->required();
    apply->add_option("--input", apply_in)->required();
    apply->add_option("--output", apply_out)->required();
    apply->add_option("--config", "JSON file whose keys expand to options");

    // pairs
    auto* pairs = app.add_subcommand("pairs", "Self-supervised patch pairs");
    pairs->require_subcommand(1);
    std::string pairs_scenes, pairs_out = "pairs";
    int pairs_looks = 3, pairs_patch = 96;
    bool pairs_match = false;
    auto* build = pairs->add_subcommand("build", "Extract pairs from normalized scenes");
    build->add_option("--scenes", pairs_scenes, "Scene manifest JSON")->required();
    build->add_option("--looks", pairs_looks)->capture_default_str();
    build->add_option("--patch", pairs_patch)->capture_default_str();
    build->add_flag("--histogram-match", pairs_match, "Match each input patch to its target histogram");
    build->add_option("--out", pairs_out)->capture_default_str();
    build->add_option("--config", "JSON file whose keys expand to options");

    // enhance / refine
    EnhanceArgs enh;
    auto* enhance = app.add_subcommand("enhance", "Tiled enhancement with optional refinement passes");
    enh.add(enhance, true);
    enhance->add_option("--config", "JSON file whose keys expand to options");
    EnhanceArgs ref;
    auto* refine = app.add_subcommand("refine", "Iterative SI refinement of one raster");
    ref.add(refine, false);
    refine->add_option("--config", "JSON file whose keys expand to options");

    // evaluate
    std::string ev_pred, ev_ref, ev_rois, ev_clip, ev_out = "report.json";
    std::size_t ev_kde_samples = 16384;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "PSNR / SSIM / ENL / KDE distance report");
    evaluate_cmd->add_option("--pred", ev_pred, "Prediction GRDF or directory")->required();
    evaluate_cmd->add_option("--ref", ev_ref, "Reference GRDF or directory (matched by file name)")->required();
    evaluate_cmd->add_option("--rois", ev_rois, "ROI JSON");
    evaluate_cmd->add_option("--clipspec", ev_clip, "ClipSpec JSON for rasters without clip bounds");
    evaluate_cmd->add_option("--kde-samples", ev_kde_samples)->capture_default_str();
    evaluate_cmd->add_option("--out", ev_out)->capture_default_str();
    evaluate_cmd->add_option("--config", "JSON file whose keys expand to options");

    // report
    std::string rep_in, rep_out;
    auto* report_cmd = app.add_subcommand("report", "Format an evaluation report as a table");
    report_cmd->add_option("--input", rep_in, "report.json")->required();
    report_cmd->add_option("--out", rep_out, "Write the table here instead of stdout");
    report_cmd->add_option("--config", "JSON file whose keys expand to options");

    // pipeline
    std::string pipe_config, pipe_out;
    auto* pipeline = app.add_subcommand("pipeline", "Run the full pipeline from a PipelineConfig JSON");
    pipeline->add_option("--config", pipe_config, "PipelineConfig JSON")->required();
    pipeline->add_option("--out-dir", pipe_out, "Override out_dir");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        args.pop_back();
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    }

    try {
        if (threads > 0) set_num_threads(threads);

        if (simulate->parsed()) {
            auto spec = load_json(sim_scene).get<SceneSpec>();
            if (sim_seed) spec.rng_seed = *sim_seed;
            RadarParams radar;
            if (!sim_radar.empty()) radar = load_json(sim_radar).get<RadarParams>();
            if (sim_hamming) radar.hamming_coefficient = *sim_hamming;
            auto sim = simulate_slc(spec, radar);
            sim.slc.scene_id = sim.clean_reflectivity.scene_id = sim_id;
            sim.slc.polarization = sim.clean_reflectivity.polarization = parse_polarization(sim_pol);
            fs::create_directories(sim_out);
            const nlohmann::json side{{"scene_spec", spec}};
            write_grdf(sim.slc, fs::path(sim_out) / "slc.grdf", side);
            write_grdf(sim.clean_reflectivity, fs::path(sim_out) / "clean.grdf", side);
            if (!spec.homogeneous_regions.empty())
                save_json(fs::path(sim_out) / "rois.json", homogeneous_rois(spec, sim_id));
        } else if (decompose_cmd->parsed()) {
            auto slc = read_complex_grdf(dec_input);
            if (dec_hamming) {
                slc.params.hamming_coefficient = *dec_hamming;
                slc.azimuth_weighting_applied = *dec_hamming < 1.0;
            }
            const auto spec = make_spec(slc, dec_looks);
            auto set = decompose(slc, spec);
            const double residual = recompose_check(set, slc);
            fs::create_directories(dec_out);
            nlohmann::json side{{"subaperture", spec},
                                {"recompose_residual", residual},
                                {"resolution", resolution_summary(slc.params, spec)},
                                {"source", dec_input}};
            save_json(fs::path(dec_out) / "subaperture.json", side);
            for (std::size_t k = 0; k < set.looks.size(); ++k) {
                auto look_side = side;
                look_side["look"] = k;
                const auto path = fs::path(dec_out) / ("look_" + std::to_string(k) + ".grdf");
                write_grdf(set.looks[k], path, look_side);
                std::cout << path.string() << '\n';
            }
        } else if (fit->parsed()) {
            std::vector<IntensityRaster> rasters;
            for (const auto& p : list_files(load_json(fit_manifest), "rasters")) rasters.push_back(to_db_raster(read_grdf(p)));
            ClipSpec spec;
            spec.low_percentile = fit_low;
            spec.high_percentile = fit_high;
            spec.per_polarization = !fit_joint;
            const auto fitted = fit_clip(rasters, spec);
            save_json(fit_out, fitted);
            for (const auto& [pol, b] : fitted.bounds)
                std::cout << to_string(pol) << ": [" << b.low_db << ", " << b.high_db << "] dB\n";
        } else if (apply->parsed()) {
            const auto spec = load_json(apply_clip).get<ClipSpec>();
            const auto out = clip_and_normalize(to_db_raster(read_grdf(apply_in)), spec);
            write_grdf(out, apply_out);
        } else if (build->parsed()) {
            const auto manifest_json = load_json(pairs_scenes);
            SplitManifest manifest;
            manifest.patch_size = pairs_patch;
            for (const auto& s : manifest_json.at("scenes"))
                manifest.assignments[s.at("id").get<std::string>()] = parse_split(s.value("split", std::string("train")));
            manifest.validate();
            PairWriter writer(pairs_out, pairs_looks, pairs_patch);
            for (const auto& s : manifest_json.at("scenes")) {
                const auto full = read_intensity_grdf(s.at("full").get<std::string>());
                const auto look_paths = s.at("looks").get<std::vector<std::string>>();
                if (int(look_paths.size()) != pairs_looks)
                    fail(ErrorKind::validation, "scene '" + s.at("id").get<std::string>() + "' lists " +
                                                    std::to_string(look_paths.size()) + " looks, expected " +
                                                    std::to_string(pairs_looks));
                std::vector<IntensityRaster> looks;
                for (const auto& p : look_paths) looks.push_back(read_intensity_grdf(p));
                for (auto& p : extract_pairs(full, looks, manifest, s.at("id").get<std::string>())) {
                    if (pairs_match)
                        for (auto& in : p.inputs) in = histogram_match(in, p.target);
                    writer.write(p);
                    ++manifest.counts[p.split];
                }
            }
            std::cout << writer.finish(manifest) << " pairs written to " << pairs_out << '\n';
        } else if (enhance->parsed()) {
            enh.run();
        } else if (refine->parsed()) {
            ref.run();
        } else if (evaluate_cmd->parsed()) {
            std::vector<fs::path> preds;
            if (fs::is_directory(ev_pred)) {
                for (const auto& f : fs::directory_iterator(ev_pred))
                    if (f.path().extension() == ".grdf") preds.push_back(f.path());
                std::sort(preds.begin(), preds.end());
            } else {
                preds.push_back(ev_pred);
            }
            if (preds.empty()) fail(ErrorKind::validation, "no GRDF predictions under '" + ev_pred + "'");
            std::optional<ClipSpec> clip;
            if (!ev_clip.empty()) clip = load_json(ev_clip).get<ClipSpec>();
            RoiSet rois;
            if (!ev_rois.empty()) {
                rois = load_json(ev_rois).get<RoiSet>();
                rois.validate();
            }
            auto with_bounds = [&](IntensityRaster r) {
                if (!r.clip_bounds && clip) r.clip_bounds = clip->bounds_for(r.polarization);
                return r;
            };
            EvalReport report;
            report.reference = ev_ref;
            report.rois = rois;
            EvalOptions options;
            options.kde_max_samples = ev_kde_samples;
            for (const auto& p : preds) {
                const auto file = read_grdf(p);
                if (file.is_complex()) fail(ErrorKind::validation, "'" + p.string() + "' is complex; evaluate normalized rasters");
                const auto pred = with_bounds(std::get<IntensityRaster>(file.raster));
                const fs::path ref_path = fs::is_directory(ev_ref) ? fs::path(ev_ref) / stem_path(p) : fs::path(ev_ref);
                const auto reference = with_bounds(read_intensity_grdf(ref_path));
                const std::string method = file.sidecars.value("method", p.stem().string());
                const int pass = file.sidecars.value("pass", 0);
                rois.validate_bounds(pred.scene_id, pred.height(), pred.width());
                const auto scene_rois = rois.for_scene(pred.scene_id);
                report.entries.push_back(evaluate(pred, reference, scene_rois, method, pass, options, &report.warnings));
            }
            report.aggregate();
            save_json(ev_out, report);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << format_table(report);
        } else if (report_cmd->parsed()) {
            const auto report = load_json(rep_in).get<EvalReport>();
            const auto table = format_table(report);
            if (rep_out.empty())
                std::cout << table;
            else
                std::ofstream(rep_out) << table;
        } else if (pipeline->parsed()) {
            auto config = load_pipeline_config(pipe_config);
            if (!pipe_out.empty()) config.out_dir = pipe_out;
            const auto result = run_pipeline(config);
            std::cout << "run directory: " << result.run_dir.string() << "\n\n" << format_table(result.report);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error [validation]: " << e.what() << '\n';
        return exit_code(ErrorKind::validation);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error [io]: " << e.what() << '\n';
        return exit_code(ErrorKind::io);
    }
    return 0;
}

#include "sarsub/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "detail/external_tile.hpp"
#include "detail/tiling.hpp"

namespace sarsub {

const char* to_string(EnhancerKind k) {
    switch (k) {
    case EnhancerKind::identity: return "identity";
    case EnhancerKind::subap_multilook: return "multilook";
    case EnhancerKind::lee_filter: return "lee";
    case EnhancerKind::boxcar: return "boxcar";
    case EnhancerKind::external: return "external";
    }
    return "?";
}

EnhancerKind parse_enhancer_kind(const std::string& s) {
    static const std::map<std::string, EnhancerKind> kinds{{"identity", EnhancerKind::identity},
                                                           {"multilook", EnhancerKind::subap_multilook},
                                                           {"subap_multilook", EnhancerKind::subap_multilook},
                                                           {"lee", EnhancerKind::lee_filter},
                                                           {"lee_filter", EnhancerKind::lee_filter},
                                                           {"boxcar", EnhancerKind::boxcar},
                                                           {"external", EnhancerKind::external}};
    auto it = kinds.find(s);
    if (it == kinds.end()) fail(ErrorKind::validation, "unknown enhancer '" + s + "'");
    return it->second;
}

void EnhancerBinding::validate() const {
    require(looks >= 1, "enhancer needs at least one look");
    if (kind == EnhancerKind::lee_filter || kind == EnhancerKind::boxcar)
        require(window >= 3 && window % 2 == 1, "filter window must be odd and >= 3");
    if (kind == EnhancerKind::lee_filter) require(noise_cv >= 0, "noise_cv must be >= 0");
    if (kind == EnhancerKind::external) {
        require(external.has_value() && !external->command_template.empty(),
                "external enhancer requires a command template");
        require(external->timeout.count() > 0, "external timeout must be positive");
    }
}

void to_json(nlohmann::json& j, const EnhancerBinding& b) {
    j = nlohmann::json{{"kind", to_string(b.kind)},
                       {"arity", b.arity == Arity::si ? "si" : "mf"},
                       {"looks", b.looks},
                       {"window", b.window},
                       {"noise_cv", b.noise_cv}};
    if (b.external) {
        j["command"] = b.external->command_template;
        j["timeout_s"] = b.external->timeout.count();
        if (!b.external->workdir.empty()) j["workdir"] = b.external->workdir.string();
    }
}

void from_json(const nlohmann::json& j, EnhancerBinding& b) {
    b = EnhancerBinding{};
    b.kind = parse_enhancer_kind(j.value("kind", std::string("identity")));
    const auto arity = j.value("arity", std::string(b.kind == EnhancerKind::subap_multilook ? "mf" : "si"));
    if (arity != "si" && arity != "mf") fail(ErrorKind::validation, "arity must be si or mf");
    b.arity = arity == "si" ? Arity::si : Arity::mf;
    b.looks = j.value("looks", 3);
    b.window = j.value("window", 7);
    b.noise_cv = j.value("noise_cv", 1.0);
    if (j.contains("command")) {
        ExternalCommand c;
        c.command_template = j.at("command").get<std::string>();
        c.timeout = std::chrono::seconds(j.value("timeout_s", 300));
        c.workdir = j.value("workdir", std::string());
        b.external = c;
    }
}

int TilingPlan::stride() const { return std::max(1, int(std::lround(double(tile_size) * (1.0 - overlap)))); }

void TilingPlan::validate() const {
    require(tile_size >= 32, "tile size must be >= 32");
    require(overlap >= 0.0 && overlap <= 0.75, "overlap fraction must lie in [0, 0.75]");
}

namespace {

// Per-pixel window mean and variance with reflected borders, via separable sums.
void local_moments(const Plane& in, int window, Plane& mean, Plane* var) {
    const int r = window / 2, h = in.height, w = in.width;
    Plane hs(h, w), hs2(h, w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0, s2 = 0.0;
            for (int k = -r; k <= r; ++k) {
                const double v = in.at(y, detail::reflect_index(x + k, w));
                s += v;
                s2 += v * v;
            }
            hs.at(y, x) = s;
            hs2.at(y, x) = s2;
        }
    const double inv = 1.0 / double(window * window);
    mean = Plane(h, w);
    if (var) *var = Plane(h, w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0, s2 = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int yy = detail::reflect_index(y + k, h);
                s += hs.at(yy, x);
                s2 += hs2.at(yy, x);
            }
            const double m = s * inv;
            mean.at(y, x) = m;
            if (var) var->at(y, x) = std::max(0.0, s2 * inv - m * m);
        }
}

void check_window(const Plane& in, int window) {
    require(window >= 3 && window % 2 == 1, "filter window must be odd and >= 3");
    if (window > in.height || window > in.width) fail(ErrorKind::validation, "filter window larger than raster");
}

}  // namespace

Plane lee_filter(const Plane& in, int window, double noise_cv) {
    check_window(in, window);
    require(noise_cv >= 0, "noise_cv must be >= 0");
    Plane mean, var;
    local_moments(in, window, mean, &var);
    const double cn2 = noise_cv * noise_cv;
    Plane out(in.height, in.width);
    const std::size_t n = in.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double m = mean.data[i], v = var.data[i];
        double k;
        if (cn2 == 0.0)
            k = 1.0;
        else if (v > 0.0 && m != 0.0)
            k = std::max(0.0, 1.0 - cn2 * m * m / v);
        else
            k = 0.0;
        out.data[i] = in.data[i] - (1.0 - k) * (in.data[i] - m);
    }
    return out;
}

Plane boxcar_filter(const Plane& in, int window) {
    check_window(in, window);
    Plane mean;
    local_moments(in, window, mean, nullptr);
    return mean;
}

Plane multilook(std::span<const Plane> looks, const std::optional<ClipBounds>& bounds) {
    require(!looks.empty(), "multilook needs at least one look");
    for (const auto& l : looks) require(l.same_grid(looks[0]), "multilook inputs must share a grid");
    Plane out(looks[0].height, looks[0].width);
    const std::size_t n = out.size();
    const double inv = 1.0 / double(looks.size());
    if (!bounds) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (const auto& l : looks) s += l.data[i];
            out.data[i] = s * inv;
        }
        return out;
    }
    const double lo = bounds->low_db, span = bounds->high_db - bounds->low_db;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& l : looks) s += std::pow(10.0, (lo + l.data[i] * span) / 10.0);
        const double db = 10.0 * std::log10(s * inv);
        out.data[i] = std::clamp((db - lo) / span, 0.0, 1.0);
    }
    return out;
}

namespace {

Plane apply_builtin(const EnhancerBinding& b, std::span<const Plane> tiles, const std::optional<ClipBounds>& bounds) {
    switch (b.kind) {
    case EnhancerKind::identity: return tiles[0];
    case EnhancerKind::subap_multilook: return multilook(tiles, bounds);
    case EnhancerKind::lee_filter: return lee_filter(tiles[0], b.window, b.noise_cv);
    case EnhancerKind::boxcar: return boxcar_filter(tiles[0], b.window);
    case EnhancerKind::external: break;
    }
    fail(ErrorKind::validation, "external enhancer cannot run as a built-in");
}

void check_inputs(std::span<const IntensityRaster> inputs, const EnhancerBinding& binding, const TilingPlan& plan) {
    binding.validate();
    plan.validate();
    if (int(inputs.size()) != binding.input_count())
        fail(ErrorKind::validation, "enhancer arity expects " + std::to_string(binding.input_count()) +
                                        " input raster(s), got " + std::to_string(inputs.size()));
    for (const auto& in : inputs) {
        in.require_state(RadiometricState::normalized_unit, "enhance_tiled");
        if (!in.same_grid(inputs[0])) fail(ErrorKind::validation, "enhancer inputs must share a grid");
    }
}

IntensityRaster output_like(std::span<const IntensityRaster> inputs, Plane plane) {
    IntensityRaster out;
    out.plane = std::move(plane);
    out.state = RadiometricState::normalized_unit;
    out.clip_bounds = inputs[0].clip_bounds;
    out.scene_id = inputs[0].scene_id;
    out.polarization = inputs[0].polarization;
    for (const auto& in : inputs) out.nodata = mask_union(out.nodata, in.nodata);
    return out;
}

}  // namespace

Plane apply_enhancer(const EnhancerBinding& binding, std::span<const Plane> tiles,
                     const std::optional<ClipBounds>& bounds) {
    binding.validate();
    require(int(tiles.size()) == binding.input_count(), "enhancer arity mismatch");
    if (binding.kind != EnhancerKind::external) return apply_builtin(binding, tiles, bounds);
    const auto dir = detail::make_work_dir(*binding.external);
    return detail::run_external_tile(*binding.external, tiles, bounds, dir);
}

IntensityRaster enhance_tiled(std::span<const IntensityRaster> inputs, const EnhancerBinding& binding,
                              const TilingPlan& plan) {
    check_inputs(inputs, binding, plan);
    const int h = inputs[0].height(), w = inputs[0].width(), t = plan.tile_size;
    const auto ly = detail::tile_layout(h, plan), lx = detail::tile_layout(w, plan);
    const auto hann = detail::hann_weights(t);
    const auto bounds = inputs[0].clip_bounds;
    const bool external = binding.kind == EnhancerKind::external;
    const auto workdir = external ? detail::make_work_dir(*binding.external) : std::filesystem::path{};

    Plane acc(ly.padded, lx.padded), wsum(ly.padded, lx.padded);
    const int ncols = int(lx.origins.size());
    std::vector<Plane> outputs(static_cast<std::size_t>(ncols));

    // One row of tiles at a time: tiles run in parallel, blending is serial in tile order.
    for (std::size_t row = 0; row < ly.origins.size(); ++row) {
        const int oy = ly.origins[row];
        std::optional<Error> failure;
#pragma omp parallel for schedule(dynamic)
        for (int col = 0; col < ncols; ++col) {
            try {
                const int ox = lx.origins[std::size_t(col)];
                std::vector<Plane> tiles;
                for (const auto& in : inputs) tiles.push_back(detail::extract_tile(in.plane, ly, lx, oy, ox, t));
                Plane out = external ? detail::run_external_tile(
                                           *binding.external, tiles, bounds,
                                           workdir / ("tile_" + std::to_string(row) + "_" + std::to_string(col)))
                                     : apply_builtin(binding, tiles, bounds);
                if (out.height != t || out.width != t)
                    fail(ErrorKind::protocol_violation, "enhancer returned a tile of the wrong size");
                outputs[std::size_t(col)] = std::move(out);
            } catch (const Error& e) {
#pragma omp critical(sarsub_tile_failure)
                if (!failure) failure = e;
            } catch (const std::exception& e) {
#pragma omp critical(sarsub_tile_failure)
                if (!failure) failure = Error(ErrorKind::numeric, e.what());
            }
        }
        if (failure) throw *failure;
        for (int col = 0; col < ncols; ++col) {
            const int ox = lx.origins[std::size_t(col)];
            const Plane& out = outputs[std::size_t(col)];
            for (int y = 0; y < t; ++y)
                for (int x = 0; x < t; ++x) {
                    const double wt = hann[std::size_t(y)] * hann[std::size_t(x)];
                    acc.at(oy + y, ox + x) += wt * out.at(y, x);
                    wsum.at(oy + y, ox + x) += wt;
                }
        }
    }
    if (external && binding.external->workdir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(workdir, ec);
    }

    Plane result(h, w);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int py = y + ly.pad_before, px = x + lx.pad_before;
            result.at(y, x) = acc.at(py, px) / wsum.at(py, px);
        }
    return output_like(inputs, std::move(result));
}

RefinementError::RefinementError(const Error& cause, std::vector<IntensityRaster> completed)
    : Error(cause.kind(), std::string(cause.what()) + " (refinement aborted; last completed stage: " +
                              (completed.empty() ? std::string("none") : std::to_string(completed.size() - 1)) +
                              ")"),
      completed_(std::move(completed)) {}

std::vector<IntensityRaster> iterate_refine(std::span<const IntensityRaster> initial_inputs,
                                            const EnhancerBinding& binding_init, const EnhancerBinding& binding_si,
                                            int passes, const TilingPlan& plan, int max_passes) {
    require(binding_si.arity == Arity::si, "refinement enhancer must have SI arity");
    require(passes >= 0 && passes <= max_passes,
            "refinement passes must lie in [0, " + std::to_string(max_passes) + "]");
    std::vector<IntensityRaster> stages;
    try {
        stages.push_back(enhance_tiled(initial_inputs, binding_init, plan));
        for (int p = 1; p <= passes; ++p) {
            const IntensityRaster prev = stages.back();
            stages.push_back(enhance_tiled(std::span<const IntensityRaster>(&prev, 1), binding_si, plan));
        }
    } catch (const Error& e) {
        throw RefinementError(e, std::move(stages));
    }
    return stages;
}

}  // namespace sarsub

#include "sarsub/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "sarsub/error.hpp"
#include "sarsub/preprocess.hpp"

namespace sarsub {

nlohmann::json metric_value(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double metric_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        fail(ErrorKind::validation, "bad metric value '" + s + "'");
    }
    return j.get<double>();
}

void to_json(nlohmann::json& j, const EvalEntry& e) {
    j = {{"scene_id", e.scene_id},
         {"polarization", to_string(e.polarization)},
         {"method", e.method},
         {"pass", e.pass},
         {"outputs", e.outputs},
         {"psnr_db", metric_value(e.psnr_db)},
         {"ssim", metric_value(e.ssim)},
         {"ssim_x100", metric_value(100.0 * e.ssim)},
         {"enl", metric_value(e.enl)},
         {"enl_excluded_rois", e.enl_excluded_rois},
         {"kde_distance", metric_value(e.kde_distance)}};
}

void from_json(const nlohmann::json& j, EvalEntry& e) {
    e.scene_id = j.at("scene_id").get<std::string>();
    e.polarization = parse_polarization(j.at("polarization").get<std::string>());
    e.method = j.at("method").get<std::string>();
    e.pass = j.value("pass", 0);
    e.outputs = j.value("outputs", 1);
    e.psnr_db = metric_from_json(j.at("psnr_db"));
    e.ssim = metric_from_json(j.at("ssim"));
    e.enl = metric_from_json(j.at("enl"));
    e.enl_excluded_rois = j.value("enl_excluded_rois", std::size_t{0});
    e.kde_distance = metric_from_json(j.at("kde_distance"));
}

void to_json(nlohmann::json& j, const EvalAggregate& a) {
    j = {{"method", a.method},
         {"pass", a.pass},
         {"polarization", to_string(a.polarization)},
         {"scenes", a.scenes},
         {"psnr_db", metric_value(a.psnr_db)},
         {"ssim", metric_value(a.ssim)},
         {"ssim_x100", metric_value(100.0 * a.ssim)},
         {"enl", metric_value(a.enl)},
         {"kde_distance", metric_value(a.kde_distance)}};
}

void from_json(const nlohmann::json& j, EvalAggregate& a) {
    a.method = j.at("method").get<std::string>();
    a.pass = j.value("pass", 0);
    a.polarization = parse_polarization(j.at("polarization").get<std::string>());
    a.scenes = j.value("scenes", 0);
    a.psnr_db = metric_from_json(j.at("psnr_db"));
    a.ssim = metric_from_json(j.at("ssim"));
    a.enl = metric_from_json(j.at("enl"));
    a.kde_distance = metric_from_json(j.at("kde_distance"));
}

void to_json(nlohmann::json& j, const EvalReport& r) {
    j = {{"format", "sarsub-eval-1"},
         {"reference", r.reference},
         {"entries", r.entries},
         {"aggregates", r.aggregates},
         {"rois", r.rois},
         {"warnings", r.warnings}};
}

void from_json(const nlohmann::json& j, EvalReport& r) {
    if (j.value("format", std::string()) != "sarsub-eval-1")
        fail(ErrorKind::validation, "not an evaluation report (format sarsub-eval-1 expected)");
    r.reference = j.value("reference", std::string());
    r.entries = j.at("entries").get<std::vector<EvalEntry>>();
    r.aggregates = j.value("aggregates", std::vector<EvalAggregate>{});
    r.rois = j.contains("rois") ? j.at("rois").get<RoiSet>() : RoiSet{};
    r.warnings = j.value("warnings", std::vector<std::string>{});
}

void EvalReport::aggregate() {
    aggregates.clear();
    std::vector<std::tuple<std::string, int, Polarization>> order;
    std::map<std::tuple<std::string, int, Polarization>, std::vector<const EvalEntry*>> groups;
    for (const auto& e : entries) {
        const auto key = std::make_tuple(e.method, e.pass, e.polarization);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&e);
    }
    for (const auto& key : order) {
        const auto& g = groups[key];
        EvalAggregate a;
        std::tie(a.method, a.pass, a.polarization) = key;
        a.scenes = int(g.size());
        const double inv = 1.0 / double(g.size());
        for (const auto* e : g) {
            a.psnr_db += e->psnr_db * inv;
            a.ssim += e->ssim * inv;
            a.enl += e->enl * inv;
            a.kde_distance += e->kde_distance * inv;
        }
        aggregates.push_back(a);
    }
}

EvalEntry evaluate(const IntensityRaster& pred, const IntensityRaster& ref, std::span<const Rect> rois,
                   const std::string& method, int pass, const EvalOptions& options,
                   std::vector<std::string>* warnings) {
    pred.require_state(RadiometricState::normalized_unit, "evaluate");
    ref.require_state(RadiometricState::normalized_unit, "evaluate");
    if (!pred.same_grid(ref)) fail(ErrorKind::validation, "prediction and reference grids differ");
    EvalEntry e;
    e.scene_id = pred.scene_id;
    e.polarization = pred.polarization;
    e.method = method;
    e.pass = pass;
    e.psnr_db = psnr(pred, ref);
    e.ssim = ssim(pred, ref, options.ssim);
    const auto ps = raster_samples(pred, options.kde_max_samples);
    const auto rs = raster_samples(ref, options.kde_max_samples);
    e.kde_distance = kde_distance(ps, rs, options.kde_grid_points);
    if (rois.empty()) {
        e.enl = std::numeric_limits<double>::quiet_NaN();
        if (warnings) warnings->push_back(pred.scene_id + ": no ROIs, ENL not computed");
    } else {
        if (!pred.clip_bounds) fail(ErrorKind::validation, "ENL needs clip bounds on the prediction");
        const auto res = enl(normalized_to_linear(pred), rois);
        e.enl = res.value;
        e.enl_excluded_rois = res.excluded;
        if (warnings)
            for (const auto& w : res.warnings) warnings->push_back(pred.scene_id + " " + method + ": " + w);
    }
    return e;
}

EvalEntry average_entries(std::span<const EvalEntry> entries) {
    require(!entries.empty(), "nothing to average");
    EvalEntry out = entries[0];
    out.outputs = int(entries.size());
    out.psnr_db = out.ssim = out.enl = out.kde_distance = 0.0;
    out.enl_excluded_rois = 0;
    const double inv = 1.0 / double(entries.size());
    for (const auto& e : entries) {
        out.psnr_db += e.psnr_db * inv;
        out.ssim += e.ssim * inv;
        out.enl += e.enl * inv;
        out.kde_distance += e.kde_distance * inv;
        out.enl_excluded_rois += e.enl_excluded_rois;
    }
    return out;
}

RoiSet homogeneous_rois(const SceneSpec& spec, const std::string& scene_id, int count, int size, int inset) {
    spec.validate();
    const auto& regions = spec.homogeneous_regions;
    auto clear_of_targets = [&](const Rect& r) {
        for (const auto& t : spec.point_targets)
            if (t.az >= r.az - inset && t.az < r.az + r.height + inset && t.rg >= r.rg - inset &&
                t.rg < r.rg + r.width + inset)
                return false;
        return true;
    };
    auto grown = [&](const Rect& r) { return Rect{r.az - inset, r.rg - inset, r.height + 2 * inset, r.width + 2 * inset}; };

    RoiSet out;
    auto take = [&](const Rect& area, std::size_t covered_from) {
        for (int az = area.az + inset; az + size + inset <= area.az + area.height; az += size + inset)
            for (int rg = area.rg + inset; rg + size + inset <= area.rg + area.width; rg += size + inset) {
                if (int(out.rois.size()) >= count) return;
                const Rect r{az, rg, size, size};
                bool ok = clear_of_targets(r);
                for (std::size_t k = covered_from; ok && k < regions.size(); ++k)
                    if (grown(r).overlaps(regions[k].rect)) ok = false;
                if (ok) out.rois.push_back({scene_id, r});
            }
    };
    // Topmost regions first, then the background.
    for (std::size_t k = regions.size(); k-- > 0;) take(regions[k].rect, k + 1);
    take(Rect{0, 0, spec.height, spec.width}, 0);
    return out;
}

namespace {

std::string cell(double v, int precision) {
    if (std::isnan(v)) return "-";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

}  // namespace

std::string format_table(const EvalReport& report) {
    std::vector<std::pair<std::string, int>> rows;
    std::map<std::tuple<std::string, int, Polarization>, const EvalAggregate*> by_key;
    for (const auto& a : report.aggregates) {
        if (std::find(rows.begin(), rows.end(), std::make_pair(a.method, a.pass)) == rows.end())
            rows.emplace_back(a.method, a.pass);
        by_key[{a.method, a.pass, a.polarization}] = &a;
    }
    std::size_t name_width = 6;
    for (const auto& [m, p] : rows) name_width = std::max(name_width, m.size());

    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %4s | %8s %8s | %8s %8s | %8s %8s | %8s %8s\n", int(name_width), "method",
                  "pass", "SSIM VV", "SSIM VH", "PSNR VV", "PSNR VH", "ENL VV", "ENL VH", "KDE VV", "KDE VH");
    os << line << std::string(std::string(line).size() - 1, '-') << '\n';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [m, p] : rows) {
        auto get = [&](Polarization pol) -> const EvalAggregate* {
            auto it = by_key.find({m, p, pol});
            return it == by_key.end() ? nullptr : it->second;
        };
        const auto* vv = get(Polarization::VV);
        const auto* vh = get(Polarization::VH);
        auto f = [&](const EvalAggregate* a, double EvalAggregate::*field, double scale, int prec) {
            return cell(a ? a->*field * scale : nan, prec);
        };
        std::snprintf(line, sizeof line, "%-*s %4d | %8s %8s | %8s %8s | %8s %8s | %8s %8s\n", int(name_width),
                      m.c_str(), p, f(vv, &EvalAggregate::ssim, 100.0, 1).c_str(),
                      f(vh, &EvalAggregate::ssim, 100.0, 1).c_str(), f(vv, &EvalAggregate::psnr_db, 1.0, 2).c_str(),
                      f(vh, &EvalAggregate::psnr_db, 1.0, 2).c_str(), f(vv, &EvalAggregate::enl, 1.0, 2).c_str(),
                      f(vh, &EvalAggregate::enl, 1.0, 2).c_str(), f(vv, &EvalAggregate::kde_distance, 1.0, 4).c_str(),
                      f(vh, &EvalAggregate::kde_distance, 1.0, 4).c_str());
        os << line;
    }
    return os.str();
}

}  // namespace sarsub

#include "mrd/eval.hpp"

#include "mrd/error.hpp"
#include "mrd/fuse_retrieve.hpp"
#include "mrd/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace mrd {

using Json = nlohmann::ordered_json;

std::string_view method_name(Method m) {
    switch (m) {
        case Method::low_only: return "low_only";
        case Method::multires: return "multires";
        case Method::multires_ovd: return "multires+ovd";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : all_methods()) {
        if (method_name(m) == name) return m;
    }
    throw Error(ErrorCode::config_error, "unknown method '" + std::string(name) +
                                             "' (expected low_only, multires or multires+ovd)");
}

std::vector<Method> parse_methods(std::string_view csv) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto tok = trim(csv.substr(start, comma == std::string_view::npos ? csv.npos : comma - start));
        if (!tok.empty()) {
            const Method m = parse_method(tok);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw Error(ErrorCode::config_error, "no methods given");
    return out;
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> m = {Method::low_only, Method::multires, Method::multires_ovd};
    return m;
}

bool scene_fragmented(const SyntheticSceneSpec& scene) {
    for (const auto& t : scene.targets) {
        if (t.distractor) continue;
        SyntheticSceneSpec single = scene;
        single.targets = {t};
        if (single.target_cells().size() > 1) return true;
    }
    return false;
}

namespace {

std::string default_query(const SyntheticSceneSpec& scene) {
    std::string labels;
    for (const auto& t : scene.targets) {
        if (t.distractor) continue;
        if (!labels.empty()) labels += " and the ";
        labels += t.label;
    }
    return labels.empty() ? "Where is the object?" : "Where is the " + labels + "?";
}

PipelineConfig method_config(const RunConfig& config, Method m) {
    PipelineConfig p = config.pipeline();
    p.use_coarse = m != Method::low_only;
    p.use_detection = m == Method::multires_ovd;
    return p;
}

}  // namespace

std::vector<SceneRecord> evaluate_scene(const SyntheticSceneSpec& scene, const RunConfig& config,
                                        std::span<const Method> methods) {
    scene.validate();
    config.validate();
    const PatchGrid grid = grid_for_cells(scene.grid_h, scene.grid_w, config.crop_px, config.ratio_k);
    const Providers providers = synthetic_providers(scene, config.crop_px);
    const Query query(scene.query.empty() ? default_query(scene) : scene.query);

    const auto truth_cells = scene.target_cells();
    const std::set<PatchIndex> truth(truth_cells.begin(), truth_cells.end());
    const bool fragmented = scene_fragmented(scene);

    std::vector<SceneRecord> out;
    for (Method m : methods) {
        const auto run = run_pipeline(query, {grid.dims(), nullptr}, method_config(config, m), providers);
        std::size_t hits = 0;
        for (const auto& s : run.result.selected) hits += truth.count(s.index);
        SceneRecord rec;
        rec.scene_id = scene.scene_id;
        rec.method = m;
        rec.recall_at_k = truth.empty() ? 1.0 : static_cast<double>(hits) / truth.size();
        rec.precision_at_k =
            run.result.selected.empty() ? 0.0 : static_cast<double>(hits) / run.result.selected.size();
        rec.target_fragmented = fragmented;
        out.push_back(std::move(rec));
    }
    return out;
}

EvalReport run_eval(const std::filesystem::path& dir, const RunConfig& config,
                    std::span<const Method> methods) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::io_error, "scene directory '" + dir.string() + "' not found");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    EvalReport report;
    report.top_k = config.top_k;
    std::vector<std::vector<SceneRecord>> per_scene;
    for (const auto& file : files) {
        try {
            std::ifstream in(file);
            const Json j = Json::parse(in, nullptr, false);
            if (j.is_discarded()) throw Error(ErrorCode::config_error, "not valid JSON");
            SyntheticSceneSpec scene = scene_from_json(j);
            if (scene.scene_id.empty()) scene.scene_id = file.stem().string();
            per_scene.push_back(evaluate_scene(scene, config, methods));
        } catch (const std::exception& e) {
            report.failures.push_back({file.filename().string(), e.what()});
        }
    }
    std::stable_sort(per_scene.begin(), per_scene.end(),
                     [](const auto& a, const auto& b) { return a.front().scene_id < b.front().scene_id; });
    for (auto& recs : per_scene) {
        for (auto& r : recs) report.records.push_back(std::move(r));
    }
    return report;
}

std::vector<MethodSummary> EvalReport::summary() const {
    std::vector<MethodSummary> out;
    for (Method m : all_methods()) {
        MethodSummary s;
        s.method = m;
        for (const auto& r : records) {
            if (r.method != m) continue;
            ++s.scenes;
            s.mean_recall_at_k += r.recall_at_k;
            s.mean_precision_at_k += r.precision_at_k;
        }
        if (s.scenes == 0) continue;
        s.mean_recall_at_k /= s.scenes;
        s.mean_precision_at_k /= s.scenes;
        out.push_back(s);
    }
    return out;
}

Json EvalReport::to_json() const {
    Json scenes = Json::array();
    for (const auto& r : records) {
        scenes.push_back(Json{{"scene_id", r.scene_id},
                              {"method", method_name(r.method)},
                              {"recall_at_k", round_sig7(r.recall_at_k)},
                              {"precision_at_k", round_sig7(r.precision_at_k)},
                              {"target_fragmented", r.target_fragmented}});
    }
    Json aggregate = Json::object();
    for (const auto& s : summary()) {
        aggregate[std::string(method_name(s.method))] =
            Json{{"scenes", s.scenes},
                 {"mean_recall_at_k", round_sig7(s.mean_recall_at_k)},
                 {"mean_precision_at_k", round_sig7(s.mean_precision_at_k)}};
    }
    Json failed = Json::array();
    for (const auto& f : failures) failed.push_back(Json{{"source", f.source}, {"error", f.message}});

    Json j;
    j["top_k"] = top_k;
    j["scenes"] = std::move(scenes);
    j["aggregate"] = std::move(aggregate);
    j["failures"] = std::move(failed);
    return j;
}

std::string EvalReport::table() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %7s %12s %15s\n", "method", "scenes", "recall@k",
                  "precision@k");
    out += line;
    for (const auto& s : summary()) {
        std::snprintf(line, sizeof line, "%-14s %7d %12.4f %15.4f\n",
                      std::string(method_name(s.method)).c_str(), s.scenes, s.mean_recall_at_k,
                      s.mean_precision_at_k);
        out += line;
    }
    if (!failures.empty()) {
        std::snprintf(line, sizeof line, "%zu scene(s) failed\n", failures.size());
        out += line;
    }
    return out;
}

}  // namespace mrd

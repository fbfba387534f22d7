#include "mrd/serialize.hpp"

#include "mrd/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mrd {

using Json = nlohmann::ordered_json;

double round_sig7(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return std::strtod(buf, nullptr);
}

Json map_to_json(const ScoreMap& map) {
    Json values = Json::array();
    for (double v : map.values()) values.push_back(round_sig7(v));
    Json j;
    j["grid_h"] = map.rows();
    j["grid_w"] = map.cols();
    j["values"] = std::move(values);
    return j;
}

ScoreMap map_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("grid_h") || !j.contains("grid_w") ||
        !j.contains("values") || !j["grid_h"].is_number_integer() ||
        !j["grid_w"].is_number_integer() || !j["values"].is_array()) {
        throw Error(ErrorCode::config_error, "map JSON needs integer grid_h, grid_w and a values array");
    }
    std::vector<double> values;
    values.reserve(j["values"].size());
    for (const auto& v : j["values"]) {
        if (!v.is_number()) throw Error(ErrorCode::config_error, "map values must be numbers");
        values.push_back(v.get<double>());
    }
    try {
        return ScoreMap(j["grid_h"].get<int>(), j["grid_w"].get<int>(), std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorCode::config_error, std::string("invalid map: ") + e.what());
    }
}

Json retrieval_to_json(const RetrievalResult& r, const PatchGrid& grid) {
    Json j;
    j["grid"] = Json{{"h", grid.grid_h()},
                     {"w", grid.grid_w()},
                     {"crop_px", grid.crop_px()},
                     {"k", grid.ratio_k()}};
    Json fused = Json::array();
    for (double v : r.fused_map.values()) fused.push_back(round_sig7(v));
    j["fused_map"] = std::move(fused);

    Json selected = Json::array();
    for (const auto& s : r.selected) {
        selected.push_back(
            Json{{"row", s.index.row}, {"col", s.index.col}, {"score", round_sig7(s.score)}});
    }
    j["selected"] = std::move(selected);

    Json cells = Json::array();
    for (const auto& c : r.layout.cells) {
        cells.push_back(Json{{"lr", c.layout_row},
                             {"lc", c.layout_col},
                             {"row", c.source.row},
                             {"col", c.source.col}});
    }
    j["layout"] = Json{{"rows", r.layout.rows}, {"cols", r.layout.cols}, {"cells", std::move(cells)}};
    return j;
}

Json window_plan_to_json(const WindowPlan& plan, const PatchGrid& grid) {
    Json windows = Json::array();
    for (const auto& w : plan.windows) {
        windows.push_back(Json{{"x0", w.x0}, {"y0", w.y0}, {"x1", w.x1}, {"y1", w.y1}});
    }
    Json j;
    j["padded"] = Json{{"width", grid.padded_dims().width_px}, {"height", grid.padded_dims().height_px}};
    j["crop_px"] = grid.crop_px();
    j["window_px"] = {plan.window_w, plan.window_h};
    j["stride_px"] = {plan.stride_x, plan.stride_y};
    j["count"] = plan.windows.size();
    j["windows"] = std::move(windows);
    return j;
}

Json scene_to_json(const SyntheticSceneSpec& s) {
    Json targets = Json::array();
    for (const auto& t : s.targets) {
        targets.push_back(Json{{"rect", {t.rect.x0, t.rect.y0, t.rect.x1, t.rect.y1}},
                               {"label", t.label},
                               {"coherence", t.coherence},
                               {"distractor", t.distractor}});
    }
    Json j;
    j["scene_id"] = s.scene_id;
    j["grid_h"] = s.grid_h;
    j["grid_w"] = s.grid_w;
    j["background_level"] = s.background_level;
    j["noise_level"] = s.noise_level;
    j["noise_seed"] = s.noise_seed;
    j["query"] = s.query;
    j["targets"] = std::move(targets);
    return j;
}

SyntheticSceneSpec scene_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "scene must be a JSON object");
    SyntheticSceneSpec s;
    try {
        s.scene_id = j.value("scene_id", std::string{});
        s.grid_h = j.at("grid_h").get<int>();
        s.grid_w = j.at("grid_w").get<int>();
        s.background_level = j.value("background_level", 0.0);
        s.noise_level = j.value("noise_level", 0.0);
        s.noise_seed = j.value("noise_seed", std::uint64_t{0});
        s.query = j.value("query", std::string{});
        for (const auto& t : j.at("targets")) {
            const auto& r = t.at("rect");
            if (!r.is_array() || r.size() != 4) {
                throw Error(ErrorCode::config_error, "target rect must be [x0, y0, x1, y1]");
            }
            SceneTarget target;
            target.rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                           r[3].get<double>()};
            target.label = t.at("label").get<std::string>();
            target.coherence = t.value("coherence", 1.0);
            target.distractor = t.value("distractor", false);
            s.targets.push_back(std::move(target));
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("scene: ") + e.what());
    }
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::config_error, std::string("scene: ") + e.what());
    }
    return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string render_heatmap(const ScoreMap& map) {
    static constexpr char kRamp[] = " .:-=+*#%@";
    std::string out;
    out.reserve(static_cast<std::size_t>(map.rows()) * (map.cols() + 1));
    for (int r = 0; r < map.rows(); ++r) {
        for (int c = 0; c < map.cols(); ++c) {
            const int bin = std::clamp(static_cast<int>(std::floor(map.at(r, c) * 10.0)), 0, 9);
            out.push_back(kRamp[bin]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace mrd

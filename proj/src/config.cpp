#include "mrd/config.hpp"

#include "mrd/error.hpp"

#include <algorithm>

namespace mrd {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_config(const std::string& msg) { throw Error(ErrorCode::config_error, msg); }

RunConfig make_preset(const char* name, int crop, int window, int stride) {
    RunConfig c;
    c.preset = name;
    c.crop_px = crop;
    c.ratio_k = 2;
    c.window_w = c.window_h = window;
    c.stride_x = c.stride_y = stride;
    c.weight_w = 0.4;
    return c;
}

const char* coverage_name(CoverageRule r) {
    return r == CoverageRule::any_overlap ? "any_overlap" : "center_point";
}

std::pair<int, int> read_pair(const Json& v, const char* key) {
    if (v.is_number_integer()) {
        const int n = v.get<int>();
        return {n, n};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        return {v[0].get<int>(), v[1].get<int>()};
    }
    bad_config(std::string(key) + " must be an integer or a [w, h] pair");
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"vstar", "hr4k", "hr8k"};
    return names;
}

RunConfig preset_config(std::string_view name) {
    if (name == "vstar") return make_preset("vstar", 112, 1232, 896);
    if (name == "hr4k") return make_preset("hr4k", 224, 2240, 1792);
    if (name == "hr8k") return make_preset("hr8k", 448, 3136, 2688);
    bad_config("unknown preset '" + std::string(name) + "' (expected vstar, hr4k or hr8k)");
}

void RunConfig::validate() const {
    if (crop_px < 1) bad_config("crop_px must be >= 1");
    if (ratio_k < 2) bad_config("ratio_k must be an integer >= 2");
    if (window_w < 1 || window_h < 1) bad_config("window_px must be positive");
    if (stride_x < 1 || stride_y < 1) bad_config("stride_px must be positive");
    if (!(tau_det >= 0.0 && tau_det <= 1.0)) bad_config("tau_det must be in [0,1]");
    if (!(weight_w >= 0.0 && weight_w <= 1.0)) bad_config("weight_w must be in [0,1]");
    if (top_k < 1) bad_config("top_k must be >= 1");
    if (max_steps < 1) bad_config("max_steps must be >= 1");
    if (!(answer_tau >= 0.0 && answer_tau <= 1.0)) bad_config("answer_tau must be in [0,1]");
}

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.crop_px = crop_px;
    p.ratio_k = ratio_k;
    p.window_w = window_w;
    p.window_h = window_h;
    p.stride_x = stride_x;
    p.stride_y = stride_y;
    p.detection = {tau_det, coverage};
    p.fusion = {weight_w, top_k, max_steps, answer_tau};
    return p;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["preset"] = c.preset;
    j["crop_px"] = c.crop_px;
    j["ratio_k"] = c.ratio_k;
    j["window_px"] = {c.window_w, c.window_h};
    j["stride_px"] = {c.stride_x, c.stride_y};
    j["tau_det"] = c.tau_det;
    j["weight_w"] = c.weight_w;
    j["top_k"] = c.top_k;
    j["max_steps"] = c.max_steps;
    j["answer_tau"] = c.answer_tau;
    j["coverage"] = coverage_name(c.coverage);
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    if (!j.is_object()) bad_config("config must be a JSON object");
    try {
        RunConfig c = preset_config(j.value("preset", std::string("vstar")));
        if (j.contains("crop_px")) c.crop_px = j["crop_px"].get<int>();
        if (j.contains("ratio_k")) {
            if (!j["ratio_k"].is_number_integer()) bad_config("ratio_k must be an integer >= 2");
            c.ratio_k = j["ratio_k"].get<int>();
        }
        if (j.contains("window_px")) std::tie(c.window_w, c.window_h) = read_pair(j["window_px"], "window_px");
        if (j.contains("stride_px")) std::tie(c.stride_x, c.stride_y) = read_pair(j["stride_px"], "stride_px");
        if (j.contains("tau_det")) c.tau_det = j["tau_det"].get<double>();
        if (j.contains("weight_w")) c.weight_w = j["weight_w"].get<double>();
        if (j.contains("top_k")) c.top_k = j["top_k"].get<int>();
        if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<int>();
        if (j.contains("answer_tau")) c.answer_tau = j["answer_tau"].get<double>();
        if (j.contains("coverage")) {
            const auto rule = j["coverage"].get<std::string>();
            if (rule == "any_overlap") {
                c.coverage = CoverageRule::any_overlap;
            } else if (rule == "center_point") {
                c.coverage = CoverageRule::center_point;
            } else {
                bad_config("coverage must be any_overlap or center_point");
            }
        }
        c.validate();
        return c;
    } catch (const Json::exception& e) {
        bad_config(std::string("config: ") + e.what());
    }
}

}  // namespace mrd

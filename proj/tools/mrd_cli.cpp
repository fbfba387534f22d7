// Command-line front end. Talks to the engine only through the C API.

#include "mrd/mrd.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSceneFailures = 1;
constexpr int kExitIo = 2;
constexpr int kExitProvider = 3;
constexpr int kExitConfig = 4;

int exit_code_for(mrd_status s) {
    switch (s) {
        case MRD_OK: return kExitOk;
        case MRD_E_IO: return kExitIo;
        case MRD_E_PROVIDER:
        case MRD_E_PROTOCOL:
        case MRD_E_DEGENERATE_INPUT: return kExitProvider;
        case MRD_E_INVALID_ARGUMENT:
        case MRD_E_CONFIG: return kExitConfig;
        case MRD_E_INTERNAL: break;
    }
    return 1;
}

struct CliFailure {
    int code;
};

void check(mrd_status s, const char* what) {
    if (s == MRD_OK) return;
    std::string stage = mrd_last_error_stage();
    std::cerr << "mrd: " << what << ": " << mrd_status_name(s);
    if (!stage.empty()) std::cerr << " [" << stage << "]";
    std::cerr << ": " << mrd_last_error() << "\n";
    throw CliFailure{exit_code_for(s)};
}

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { mrd_string_free(p); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

struct EngineHandle {
    mrd_engine* p = nullptr;
    ~EngineHandle() { mrd_engine_destroy(p); }
};

struct ResultHandle {
    mrd_result* p = nullptr;
    ~ResultHandle() { mrd_result_destroy(p); }
};

std::string read_text(const std::string& path, int failure_code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "mrd: cannot read '" << path << "'\n";
        throw CliFailure{failure_code};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        std::cerr << "mrd: cannot write '" << path.string() << "'\n";
        throw CliFailure{kExitIo};
    }
}

/// Flags shared by every subcommand that builds an engine.
struct ConfigFlags {
    std::string preset = "vstar";
    std::optional<int> crop_px;
    std::optional<int> ratio_k;
    std::optional<int> window_px;
    std::optional<int> stride_px;
    std::optional<double> tau_det;
    std::optional<double> weight_w;
    std::optional<int> top_k;

    void attach(CLI::App* app) {
        app->add_option("--preset", preset, "vstar, hr4k or hr8k")->capture_default_str();
        app->add_option("--crop-px", crop_px, "low-resolution crop side in pixels");
        app->add_option("--ratio-k", ratio_k, "coarse/low resolution ratio (integer >= 2)");
        app->add_option("--window-px", window_px, "sliding window side in pixels");
        app->add_option("--stride-px", stride_px, "sliding window stride in pixels");
        app->add_option("--tau-det", tau_det, "detection score threshold");
        app->add_option("--weight-w", weight_w, "detection map weight in the fusion");
        app->add_option("--top-k", top_k, "number of crops to retrieve");
    }

    std::string json() const {
        nlohmann::ordered_json j;
        j["preset"] = preset;
        if (crop_px) j["crop_px"] = *crop_px;
        if (ratio_k) j["ratio_k"] = *ratio_k;
        if (window_px) j["window_px"] = *window_px;
        if (stride_px) j["stride_px"] = *stride_px;
        if (tau_det) j["tau_det"] = *tau_det;
        if (weight_w) j["weight_w"] = *weight_w;
        if (top_k) j["top_k"] = *top_k;
        return j.dump();
    }

    void make(EngineHandle& engine) const {
        check(mrd_engine_create(json().c_str(), &engine.p), "config");
    }
};

struct RetrieveArgs {
    ConfigFlags config;
    std::string image;
    std::string query;
    std::string synthetic;
    std::string providers;
    std::string out;
    std::optional<std::string> dump_maps;
};

int cmd_retrieve(const RetrieveArgs& a) {
    EngineHandle engine;
    a.config.make(engine);
    if (!a.synthetic.empty()) {
        const auto scene = read_text(a.synthetic, kExitConfig);
        check(mrd_engine_use_synthetic(engine.p, scene.c_str()), "synthetic scene");
    } else if (!a.providers.empty()) {
        const auto cfg = read_text(a.providers, kExitConfig);
        check(mrd_engine_use_http(engine.p, cfg.c_str()), "providers");
    } else {
        check(mrd_engine_use_http(engine.p, nullptr), "providers");
    }

    ResultHandle result;
    check(mrd_engine_retrieve(engine.p, a.image.c_str(), a.query.c_str(), &result.p), "retrieve");

    OwnedString json;
    check(mrd_result_json(result.p, &json.p), "serialize");

    struct MapFile {
        mrd_map_kind kind;
        const char* name;
    };
    std::vector<std::pair<fs::path, std::string>> dumps;
    if (a.dump_maps) {
        fs::path dir = a.dump_maps->empty()
                           ? (a.out.empty() ? fs::path(".") : fs::path(a.out).parent_path())
                           : fs::path(*a.dump_maps);
        if (dir.empty()) dir = ".";
        for (const MapFile m : {MapFile{MRD_MAP_SEMANTIC, "semantic_map.json"},
                                MapFile{MRD_MAP_DETECTION, "detection_map.json"},
                                MapFile{MRD_MAP_FUSED, "fused_map.json"}}) {
            OwnedString map;
            if (mrd_result_map_json(result.p, m.kind, &map.p) == MRD_OK) {
                dumps.emplace_back(dir / m.name, map.str());
            }
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
    }

    if (a.out.empty()) {
        std::cout << json.str();
    } else {
        write_text(a.out, json.str());
    }
    for (const auto& [path, text] : dumps) write_text(path, text);
    return kExitOk;
}

struct EvalArgs {
    ConfigFlags config;
    std::string scene_dir;
    std::string methods;
    std::string out;
};

int cmd_eval(const EvalArgs& a) {
    EngineHandle engine;
    a.config.make(engine);
    OwnedString report;
    OwnedString table;
    int32_t failed = 0;
    check(mrd_engine_eval(engine.p, a.scene_dir.c_str(), a.methods.empty() ? nullptr : a.methods.c_str(),
                          &report.p, &table.p, &failed),
          "eval");
    if (!a.out.empty()) write_text(a.out, report.str());
    std::cout << table.str();
    if (failed > 0) {
        std::cerr << "mrd: " << failed << " scene(s) failed; see the report's failures list\n";
        return kExitSceneFailures;
    }
    return kExitOk;
}

int cmd_render(const std::string& path) {
    const auto text = read_text(path, kExitConfig);
    OwnedString out;
    check(mrd_render_map(text.c_str(), &out.p), "render");
    std::cout << out.str();
    return kExitOk;
}

struct PlanArgs {
    ConfigFlags config;
    std::string image;
    std::optional<int> width;
    std::optional<int> height;
};

int cmd_plan_windows(const PlanArgs& a) {
    int32_t w = 0;
    int32_t h = 0;
    if (!a.image.empty()) {
        check(mrd_png_dims(a.image.c_str(), &w, &h), "image");
    } else if (a.width && a.height) {
        w = *a.width;
        h = *a.height;
    } else {
        std::cerr << "mrd: plan-windows needs an image or both --width and --height\n";
        return kExitConfig;
    }
    EngineHandle engine;
    a.config.make(engine);
    OwnedString json;
    check(mrd_engine_plan_windows(engine.p, w, h, &json.p), "plan-windows");
    std::cout << json.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-resolution retrieval and detection over high-resolution images"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mrd_version()));

    RetrieveArgs retrieve;
    auto* r = app.add_subcommand("retrieve", "retrieve the top-K crops of a PNG for a query");
    r->add_option("image", retrieve.image, "PNG image")->required();
    r->add_option("query", retrieve.query, "question about the image")->required();
    retrieve.config.attach(r);
    auto* syn = r->add_option("--synthetic", retrieve.synthetic, "synthetic scene JSON (offline providers)");
    r->add_option("--providers", retrieve.providers, "HTTP provider config JSON")->excludes(syn);
    r->add_option("--out", retrieve.out, "write the result JSON here instead of stdout");
    r->add_option("--dump-maps", retrieve.dump_maps,
                  "also write semantic/detection/fused map JSON into DIR "
                  "(defaults to the --out directory)")
        ->expected(0, 1)
        ->type_name("[DIR]");

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "score retrieval on a directory of synthetic scenes");
    e->add_option("scene_dir", eval.scene_dir, "directory of scene JSON files")->required();
    eval.config.attach(e);
    e->add_option("--methods", eval.methods, "comma list of low_only, multires, multires+ovd");
    e->add_option("--out", eval.out, "write the report JSON here");

    std::string render_path;
    auto* rd = app.add_subcommand("render", "print a map JSON file as a text heatmap");
    rd->add_option("map", render_path, "map JSON file")->required();

    PlanArgs plan;
    auto* p = app.add_subcommand("plan-windows", "print the sliding-window plan as JSON");
    p->add_option("image", plan.image, "PNG image (or give --width and --height)");
    p->add_option("--width", plan.width, "image width in pixels");
    p->add_option("--height", plan.height, "image height in pixels");
    plan.config.attach(p);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (r->parsed()) return cmd_retrieve(retrieve);
        if (e->parsed()) return cmd_eval(eval);
        if (rd->parsed()) return cmd_render(render_path);
        if (p->parsed()) return cmd_plan_windows(plan);
    } catch (const CliFailure& f) {
        return f.code;
    }
    return kExitConfig;
}

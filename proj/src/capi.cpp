#include "mrd/mrd.h"

#include "mrd/config.hpp"
#include "mrd/error.hpp"
#include "mrd/eval.hpp"
#include "mrd/fuse_retrieve.hpp"
#include "mrd/http_providers.hpp"
#include "mrd/image.hpp"
#include "mrd/serialize.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

using mrd::Error;
using mrd::ErrorCode;
using Json = nlohmann::ordered_json;

struct mrd_engine {
    mrd::RunConfig config;
    mrd::Providers providers;
    std::optional<mrd::SyntheticSceneSpec> scene;
};

struct mrd_result {
    mrd::PipelineOutput output;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

mrd_status status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return MRD_E_INVALID_ARGUMENT;
        case ErrorCode::degenerate_input: return MRD_E_DEGENERATE_INPUT;
        case ErrorCode::provider_error: return MRD_E_PROVIDER;
        case ErrorCode::protocol_error: return MRD_E_PROTOCOL;
        case ErrorCode::io_error: return MRD_E_IO;
        case ErrorCode::config_error: return MRD_E_CONFIG;
    }
    return MRD_E_INTERNAL;
}

template <class F>
mrd_status guarded(F&& f) noexcept {
    g_error.clear();
    g_stage.clear();
    try {
        f();
        return MRD_OK;
    } catch (const Error& e) {
        g_error = e.what();
        g_stage = e.stage();
        return status_for(e.code());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
    } catch (const std::exception& e) {
        g_error = e.what();
    } catch (...) {
        g_error = "unknown error";
    }
    return MRD_E_INTERNAL;
}

char* copy_string(const std::string& s) {
    auto* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw Error(ErrorCode::invalid_argument, std::string(what) + " is null");
}

Json parse_json(const char* text, const char* what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::config_error, std::string(what) + " is not valid JSON");
    return j;
}

}  // namespace

extern "C" {

const char* mrd_version(void) { return "0.1.0"; }

const char* mrd_status_name(mrd_status status) {
    switch (status) {
        case MRD_OK: return "ok";
        case MRD_E_INVALID_ARGUMENT: return "invalid-argument";
        case MRD_E_DEGENERATE_INPUT: return "degenerate-input";
        case MRD_E_IO: return "io-error";
        case MRD_E_PROVIDER: return "provider-error";
        case MRD_E_PROTOCOL: return "protocol-error";
        case MRD_E_CONFIG: return "config-error";
        case MRD_E_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* mrd_last_error(void) { return g_error.c_str(); }
const char* mrd_last_error_stage(void) { return g_stage.c_str(); }

void mrd_string_free(char* s) { delete[] s; }

mrd_status mrd_config_resolve(const char* config_json, char** out_json) {
    return guarded([&] {
        require(config_json, "config_json");
        require(out_json, "out_json");
        *out_json = copy_string(mrd::dump(mrd::to_json(mrd::run_config_from_json(parse_json(config_json, "config")))));
    });
}

mrd_status mrd_engine_create(const char* config_json, mrd_engine** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        auto engine = std::make_unique<mrd_engine>();
        engine->config = config_json == nullptr
                             ? mrd::preset_config("vstar")
                             : mrd::run_config_from_json(parse_json(config_json, "config"));
        *out = engine.release();
    });
}

void mrd_engine_destroy(mrd_engine* engine) { delete engine; }

mrd_status mrd_engine_config(const mrd_engine* engine, char** out_json) {
    return guarded([&] {
        require(engine, "engine");
        require(out_json, "out_json");
        *out_json = copy_string(mrd::dump(mrd::to_json(engine->config)));
    });
}

mrd_status mrd_engine_use_synthetic(mrd_engine* engine, const char* scene_json) {
    return guarded([&] {
        require(engine, "engine");
        require(scene_json, "scene_json");
        auto scene = mrd::scene_from_json(parse_json(scene_json, "scene"));
        engine->providers = mrd::synthetic_providers(scene, engine->config.crop_px);
        engine->scene = std::move(scene);
    });
}

mrd_status mrd_engine_use_http(mrd_engine* engine, const char* providers_json) {
    return guarded([&] {
        require(engine, "engine");
        mrd::EndpointConfig cfg;
        if (providers_json != nullptr) {
            const auto j = nlohmann::json::parse(providers_json, nullptr, false);
            if (j.is_discarded()) throw Error(ErrorCode::config_error, "provider config is not valid JSON");
            cfg = mrd::parse_endpoint_config(j);
        }
        mrd::apply_env_overrides(cfg);
        if (!cfg.embed) throw Error(ErrorCode::config_error, "no embedding endpoint configured");
        if (!cfg.detect) throw Error(ErrorCode::config_error, "no detection endpoint configured");
        engine->providers = mrd::http_providers(cfg);
        engine->scene.reset();
    });
}

mrd_status mrd_engine_retrieve(mrd_engine* engine, const char* png_path, const char* query,
                               mrd_result** out) {
    return guarded([&] {
        require(engine, "engine");
        require(png_path, "png_path");
        require(query, "query");
        require(out, "out");
        *out = nullptr;
        if (!engine->providers.embedder) {
            throw Error(ErrorCode::config_error, "no providers configured");
        }
        const mrd::Query q(query);
        const mrd::Image image = mrd::read_png(png_path);
        if (engine->scene) {
            const auto grid = mrd::build_grid(image.dims(), engine->config.crop_px, engine->config.ratio_k);
            if (grid.grid_h() != engine->scene->grid_h || grid.grid_w() != engine->scene->grid_w) {
                throw Error(ErrorCode::config_error,
                            "synthetic scene is " + std::to_string(engine->scene->grid_h) + "x" +
                                std::to_string(engine->scene->grid_w) + " but the image grid is " +
                                std::to_string(grid.grid_h()) + "x" + std::to_string(grid.grid_w()));
            }
        }
        auto result = std::make_unique<mrd_result>(mrd_result{mrd::run_pipeline(
            q, {image.dims(), &image}, engine->config.pipeline(), engine->providers)});
        *out = result.release();
    });
}

mrd_status mrd_result_json(const mrd_result* result, char** out_json) {
    return guarded([&] {
        require(result, "result");
        require(out_json, "out_json");
        *out_json = copy_string(
            mrd::dump(mrd::retrieval_to_json(result->output.result, result->output.grid)));
    });
}

mrd_status mrd_result_map_json(const mrd_result* result, mrd_map_kind kind, char** out_json) {
    return guarded([&] {
        require(result, "result");
        require(out_json, "out_json");
        const auto& o = result->output;
        const mrd::ScoreMap* map = nullptr;
        switch (kind) {
            case MRD_MAP_SEMANTIC: map = &o.semantic; break;
            case MRD_MAP_DETECTION: map = o.detection ? &*o.detection : nullptr; break;
            case MRD_MAP_FUSED: map = &o.result.fused_map; break;
        }
        if (map == nullptr) throw Error(ErrorCode::invalid_argument, "map not available");
        *out_json = copy_string(mrd::dump(mrd::map_to_json(*map)));
    });
}

int32_t mrd_result_selected_count(const mrd_result* result) {
    return result == nullptr ? 0 : static_cast<int32_t>(result->output.result.selected.size());
}

void mrd_result_destroy(mrd_result* result) { delete result; }

mrd_status mrd_engine_plan_windows(const mrd_engine* engine, int32_t width_px, int32_t height_px,
                                   char** out_json) {
    return guarded([&] {
        require(engine, "engine");
        require(out_json, "out_json");
        const auto& c = engine->config;
        const auto grid = mrd::build_grid({width_px, height_px}, c.crop_px, c.ratio_k);
        const auto plan = mrd::plan_windows(grid, c.window_w, c.window_h, c.stride_x, c.stride_y);
        *out_json = copy_string(mrd::dump(mrd::window_plan_to_json(plan, grid)));
    });
}

mrd_status mrd_engine_eval(const mrd_engine* engine, const char* scene_dir, const char* methods_csv,
                           char** out_report_json, char** out_table, int32_t* out_failed) {
    return guarded([&] {
        require(engine, "engine");
        require(scene_dir, "scene_dir");
        const auto methods = methods_csv == nullptr ? mrd::all_methods() : mrd::parse_methods(methods_csv);
        const auto report = mrd::run_eval(scene_dir, engine->config, methods);
        if (out_report_json != nullptr) *out_report_json = copy_string(mrd::dump(report.to_json()));
        if (out_table != nullptr) *out_table = copy_string(report.table());
        if (out_failed != nullptr) *out_failed = static_cast<int32_t>(report.failures.size());
    });
}

mrd_status mrd_render_map(const char* map_json, char** out_text) {
    return guarded([&] {
        require(map_json, "map_json");
        require(out_text, "out_text");
        *out_text = copy_string(mrd::render_heatmap(mrd::map_from_json(parse_json(map_json, "map"))));
    });
}

mrd_status mrd_png_dims(const char* png_path, int32_t* width_px, int32_t* height_px) {
    return guarded([&] {
        require(png_path, "png_path");
        const auto dims = mrd::read_png_dims(png_path);
        if (width_px != nullptr) *width_px = dims.width_px;
        if (height_px != nullptr) *height_px = dims.height_px;
    });
}

}  // extern "C"

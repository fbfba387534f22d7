/*
 * C interface to the multi-resolution retrieval-detection engine.
 *
 * Handles are opaque. Every fallible call returns an mrd_status; on failure
 * mrd_last_error() describes the problem for the calling thread. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with mrd_string_free().
 */
#ifndef MRD_MRD_H
#define MRD_MRD_H

#include <stdint.h>

#if defined(_WIN32)
#define MRD_API __declspec(dllexport)
#else
#define MRD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrd_status {
    MRD_OK = 0,
    MRD_E_INVALID_ARGUMENT = 1,
    MRD_E_DEGENERATE_INPUT = 2,
    MRD_E_IO = 3,
    MRD_E_PROVIDER = 4,
    MRD_E_PROTOCOL = 5,
    MRD_E_CONFIG = 6,
    MRD_E_INTERNAL = 7
} mrd_status;

typedef enum mrd_map_kind {
    MRD_MAP_SEMANTIC = 0,
    MRD_MAP_DETECTION = 1,
    MRD_MAP_FUSED = 2
} mrd_map_kind;

typedef struct mrd_engine mrd_engine;
typedef struct mrd_result mrd_result;

MRD_API const char* mrd_version(void);
MRD_API const char* mrd_status_name(mrd_status status);
/* Message of the last failed call on this thread ("" if none). */
MRD_API const char* mrd_last_error(void);
/* Pipeline stage of the last failure ("" when not inside a pipeline run). */
MRD_API const char* mrd_last_error_stage(void);
MRD_API void mrd_string_free(char* s);

/* Resolves a run configuration (preset plus overrides) to its full form. */
MRD_API mrd_status mrd_config_resolve(const char* config_json, char** out_json);

/* config_json may be NULL for the default preset. */
MRD_API mrd_status mrd_engine_create(const char* config_json, mrd_engine** out);
MRD_API void mrd_engine_destroy(mrd_engine* engine);
MRD_API mrd_status mrd_engine_config(const mrd_engine* engine, char** out_json);

/* Installs deterministic providers driven by a synthetic scene description. */
MRD_API mrd_status mrd_engine_use_synthetic(mrd_engine* engine, const char* scene_json);

/* Installs HTTP providers. providers_json may be NULL; MRD_*_URL environment
 * variables override file values either way. */
MRD_API mrd_status mrd_engine_use_http(mrd_engine* engine, const char* providers_json);

/* Decodes a PNG, runs the full pipeline and returns the result handle. */
MRD_API mrd_status mrd_engine_retrieve(mrd_engine* engine, const char* png_path,
                                       const char* query, mrd_result** out);

MRD_API mrd_status mrd_result_json(const mrd_result* result, char** out_json);
/* MRD_E_INVALID_ARGUMENT when the requested map was not computed. */
MRD_API mrd_status mrd_result_map_json(const mrd_result* result, mrd_map_kind kind,
                                       char** out_json);
MRD_API int32_t mrd_result_selected_count(const mrd_result* result);
MRD_API void mrd_result_destroy(mrd_result* result);

MRD_API mrd_status mrd_engine_plan_windows(const mrd_engine* engine, int32_t width_px,
                                           int32_t height_px, char** out_json);

/* Scores every scene file in scene_dir. methods_csv may be NULL for all
 * methods. out_failed receives the number of scenes that could not be run. */
MRD_API mrd_status mrd_engine_eval(const mrd_engine* engine, const char* scene_dir,
                                   const char* methods_csv, char** out_report_json,
                                   char** out_table, int32_t* out_failed);

MRD_API mrd_status mrd_render_map(const char* map_json, char** out_text);

MRD_API mrd_status mrd_png_dims(const char* png_path, int32_t* width_px, int32_t* height_px);

#ifdef __cplusplus
}
#endif

#endif /* MRD_MRD_H */

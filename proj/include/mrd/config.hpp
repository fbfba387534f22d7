#pragma once

#include "mrd/detect.hpp"
#include "mrd/fuse_retrieve.hpp"

#include "json.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mrd {

/// Everything a run needs except providers. Presets mirror the benchmark
/// settings the method was tuned on:
///
///   preset  crop  window  stride
///   vstar    112    1232     896
///   hr4k     224    2240    1792
///   hr8k     448    3136    2688
///
/// with ratio_k = 2 and weight_w = 0.4 throughout.
struct RunConfig {
    std::string preset = "vstar";
    int crop_px = 112;
    int ratio_k = 2;
    int window_w = 1232;
    int window_h = 1232;
    int stride_x = 896;
    int stride_y = 896;
    double tau_det = 0.3;
    double weight_w = 0.4;
    int top_k = 16;
    int max_steps = 200;
    double answer_tau = 0.6;
    CoverageRule coverage = CoverageRule::any_overlap;

    /// Throws config_error on any out-of-range field.
    void validate() const;
    PipelineConfig pipeline() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig preset_config(std::string_view name);
const std::vector<std::string>& preset_names();

nlohmann::ordered_json to_json(const RunConfig& c);

/// Starts from the preset named in "preset" (vstar when absent) and applies
/// every other field present. `window_px` / `stride_px` take a number or a
/// [w, h] pair.
RunConfig run_config_from_json(const nlohmann::ordered_json& j);

}  // namespace mrd

#pragma once

#include "mrd/config.hpp"
#include "mrd/providers.hpp"

#include "json.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrd {

/// Ablation variants scored by the harness.
enum class Method {
    low_only,      // low-resolution similarity only
    multires,      // low and coarse maps fused
    multires_ovd,  // multires fused with the detection map
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
/// Comma-separated list, e.g. "low_only,multires".
std::vector<Method> parse_methods(std::string_view csv);
const std::vector<Method>& all_methods();

struct SceneRecord {
    std::string scene_id;
    Method method = Method::low_only;
    double recall_at_k = 0.0;     // hits / planted target cells
    double precision_at_k = 0.0;  // hits / selected cells
    bool target_fragmented = false;
};

struct SceneFailure {
    std::string source;
    std::string message;
};

struct MethodSummary {
    Method method = Method::low_only;
    int scenes = 0;
    double mean_recall_at_k = 0.0;
    double mean_precision_at_k = 0.0;
};

struct EvalReport {
    int top_k = 0;
    std::vector<SceneRecord> records;  // by scene_id, then method order
    std::vector<SceneFailure> failures;

    std::vector<MethodSummary> summary() const;
    nlohmann::ordered_json to_json() const;
    std::string table() const;
};

/// True when some planted target overlaps more than one low cell.
bool scene_fragmented(const SyntheticSceneSpec& scene);

std::vector<SceneRecord> evaluate_scene(const SyntheticSceneSpec& scene, const RunConfig& config,
                                        std::span<const Method> methods);

/// Every *.json in `dir`, sorted by name. A scene that fails to load or run
/// is recorded in failures and the rest continue.
EvalReport run_eval(const std::filesystem::path& dir, const RunConfig& config,
                    std::span<const Method> methods);

}  // namespace mrd

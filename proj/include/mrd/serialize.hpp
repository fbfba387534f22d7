#pragma once

#include "mrd/detect.hpp"
#include "mrd/fuse_retrieve.hpp"
#include "mrd/providers.hpp"
#include "mrd/score_map.hpp"

#include "json.hpp"

#include <string>

namespace mrd {

/// Rounds to 7 significant digits so every printed value is short and
/// identical across platforms.
double round_sig7(double v);

/// {grid_h, grid_w, values: [row-major]}
nlohmann::ordered_json map_to_json(const ScoreMap& map);
ScoreMap map_from_json(const nlohmann::ordered_json& j);

/// {grid: {h, w, crop_px, k}, fused_map, selected: [{row, col, score}],
///  layout: {rows, cols, cells: [{lr, lc, row, col}]}}
nlohmann::ordered_json retrieval_to_json(const RetrievalResult& r, const PatchGrid& grid);

nlohmann::ordered_json window_plan_to_json(const WindowPlan& plan, const PatchGrid& grid);

nlohmann::ordered_json scene_to_json(const SyntheticSceneSpec& s);
SyntheticSceneSpec scene_from_json(const nlohmann::ordered_json& j);

/// Pretty-printed with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

/// One character per cell from " .:-=+*#%@", bin = floor(10 v) capped at 9.
std::string render_heatmap(const ScoreMap& map);

}  // namespace mrd

#pragma once

#include "mrd/detect.hpp"
#include "mrd/grid.hpp"
#include "mrd/providers.hpp"
#include "mrd/score_map.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mrd {

struct FusionConfig {
    double weight_w = 0.4;
    int top_k = 16;
    // Carried for downstream search stages; not evaluated here.
    int max_steps = 200;
    double answer_tau = 0.6;

    void validate() const;
};

struct ScoredPatch {
    PatchIndex index;
    double score = 0.0;

    friend bool operator==(const ScoredPatch&, const ScoredPatch&) = default;
};

struct LayoutCell {
    int layout_row = 0;
    int layout_col = 0;
    PatchIndex source;

    friend bool operator==(const LayoutCell&, const LayoutCell&) = default;
};

/// Compacted arrangement of retrieved patches. Cells not listed are holes.
struct LayoutGrid {
    int rows = 0;
    int cols = 0;
    std::vector<LayoutCell> cells;  // sorted by (layout_row, layout_col)

    std::optional<PatchIndex> at(int layout_row, int layout_col) const;

    friend bool operator==(const LayoutGrid&, const LayoutGrid&) = default;
};

struct RetrievalResult {
    std::vector<ScoredPatch> selected;  // descending score
    ScoreMap fused_map;
    LayoutGrid layout;

    friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

/// (1 - w) * semantic + w * detection, elementwise.
ScoreMap fuse_maps(const ScoreMap& semantic, const ScoreMap& detection, double weight_w);

/// Sorts candidates by descending score, ties by row-major index, and keeps
/// the first top_k. The result does not depend on the input order.
std::vector<ScoredPatch> rank_candidates(std::vector<ScoredPatch> candidates, int top_k);

/// The top_k highest cells; all cells when top_k exceeds the map size.
std::vector<ScoredPatch> select_top_k(const ScoreMap& fused, int top_k);

/// Maps distinct source rows and columns to their ascending rank.
LayoutGrid spatial_layout(std::span<const PatchIndex> selected);

struct PipelineConfig {
    int crop_px = 112;
    int ratio_k = 2;
    int window_w = 1232;
    int window_h = 1232;
    int stride_x = 896;
    int stride_y = 896;
    DetectionSettings detection;
    FusionConfig fusion;
    bool use_coarse = true;     // off: low-resolution map only
    bool use_detection = true;  // off: fused map is the semantic map
};

/// Image for one pipeline run. Without pixels the run is geometry-only and
/// providers receive crops with a null image.
struct ImageInput {
    ImageDims dims;
    const Image* pixels = nullptr;
};

struct PipelineOutput {
    PatchGrid grid;
    WindowPlan plan;
    std::optional<ObjectSet> objects;
    ScoreMap semantic;
    std::optional<ScoreMap> detection;
    RetrievalResult result;
};

/// grid -> semantic map -> windows and detection map -> fusion -> top-K ->
/// layout. Errors carry the failing stage.
PipelineOutput run_pipeline(const Query& query, const ImageInput& image,
                            const PipelineConfig& config, const Providers& providers);

}  // namespace mrd

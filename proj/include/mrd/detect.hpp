#pragma once

#include "mrd/grid.hpp"
#include "mrd/providers.hpp"
#include "mrd/score_map.hpp"
#include "mrd/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace mrd {

/// Labels from the extractor, normalized. Falls back to heuristic_objects
/// when the extractor yields nothing usable; provider errors propagate.
ObjectSet extract_objects(const Query& query, ObjectExtractorProvider& extractor);

/// Deterministic keyword extraction: lowercases, strips punctuation, drops
/// interrogatives, function words and attribute words. If nothing survives
/// the whole trimmed query becomes the single label.
ObjectSet heuristic_objects(const Query& query);

class HeuristicExtractor final : public ObjectExtractorProvider {
public:
    std::vector<std::string> extract(const Query& query) override {
        return heuristic_objects(query).labels();
    }
};

struct WindowPlan {
    std::vector<PixelRect> windows;  // row-major
    int window_w = 0;
    int window_h = 0;
    int stride_x = 0;
    int stride_y = 0;

    std::size_t size() const noexcept { return windows.size(); }
};

/// Sliding windows over the padded image. Sizes and strides are snapped down
/// to multiples of crop_px (never below one crop); windows larger than the
/// image are clamped to it per axis; a stride wider than the window is
/// narrowed to the window so coverage has no gaps. The last window on each
/// axis is shifted back to end exactly at the image edge.
WindowPlan plan_windows(const PatchGrid& grid, int window_w, int window_h, int stride_x,
                        int stride_y);

/// Keeps detections with score strictly greater than tau.
std::vector<Detection> filter_detections(std::span<const Detection> dets, double tau);

enum class CoverageRule {
    any_overlap,   // box and patch share at least one pixel
    center_point,  // patch centre lies inside the box
};

/// Max-confidence map over the window's patches. `dets` are window-local;
/// a box leaving the window is an invalid_argument error.
ScoreMap window_confidence_map(const PixelRect& window, std::span<const Detection> dets,
                               const PatchGrid& grid,
                               CoverageRule rule = CoverageRule::any_overlap);

/// Mean over every window that contains each patch.
ScoreMap global_confidence_map(const WindowPlan& plan, std::span<const ScoreMap> per_window,
                               const PatchGrid& grid);

struct DetectionSettings {
    double tau_det = 0.3;
    CoverageRule rule = CoverageRule::any_overlap;
};

/// Runs the detector on every window, filters, rasterizes and averages.
ScoreMap detection_map(const PatchGrid& grid, const WindowPlan& plan, const ObjectSet& objects,
                       DetectorProvider& detector, const DetectionSettings& settings,
                       const Image* image = nullptr);

}  // namespace mrd

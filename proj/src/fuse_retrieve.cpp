#include "mrd/fuse_retrieve.hpp"

#include "mrd/error.hpp"
#include "mrd/image.hpp"
#include "mrd/semantic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace mrd {

void FusionConfig::validate() const {
    if (!(weight_w >= 0.0 && weight_w <= 1.0)) invalid_argument("weight_w must be in [0,1]");
    if (top_k < 1) invalid_argument("top_k must be >= 1");
    if (max_steps < 1) invalid_argument("max_steps must be >= 1");
    if (!(answer_tau >= 0.0 && answer_tau <= 1.0)) invalid_argument("answer_tau must be in [0,1]");
}

std::optional<PatchIndex> LayoutGrid::at(int layout_row, int layout_col) const {
    for (const auto& c : cells) {
        if (c.layout_row == layout_row && c.layout_col == layout_col) return c.source;
    }
    return std::nullopt;
}

ScoreMap fuse_maps(const ScoreMap& semantic, const ScoreMap& detection, double weight_w) {
    require_same_shape(semantic, detection, "fuse_maps");
    if (!(weight_w >= 0.0 && weight_w <= 1.0)) invalid_argument("weight_w must be in [0,1]");
    std::vector<double> out(semantic.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = semantic[i];
        const double c = detection[i];
        const double v = (1.0 - weight_w) * s + weight_w * c;
        out[i] = std::clamp(v, std::min(s, c), std::max(s, c));
    }
    return ScoreMap(semantic.rows(), semantic.cols(), std::move(out));
}

std::vector<ScoredPatch> rank_candidates(std::vector<ScoredPatch> candidates, int top_k) {
    const auto k = static_cast<std::size_t>(std::max(top_k, 0));
    const auto n = std::min(k, candidates.size());
    const auto better = [](const ScoredPatch& a, const ScoredPatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                      candidates.end(), better);
    candidates.resize(n);
    return candidates;
}

std::vector<ScoredPatch> select_top_k(const ScoreMap& fused, int top_k) {
    if (top_k < 1) invalid_argument("top_k must be >= 1");
    std::vector<ScoredPatch> cells;
    cells.reserve(fused.size());
    for (int r = 0; r < fused.rows(); ++r) {
        for (int c = 0; c < fused.cols(); ++c) cells.push_back({{r, c}, fused.at(r, c)});
    }
    return rank_candidates(std::move(cells), top_k);
}

LayoutGrid spatial_layout(std::span<const PatchIndex> selected) {
    std::set<int> rows;
    std::set<int> cols;
    std::set<PatchIndex> seen;
    for (const auto& p : selected) {
        if (!seen.insert(p).second) {
            invalid_argument("duplicate patch (" + std::to_string(p.row) + "," +
                             std::to_string(p.col) + ") in selection");
        }
        rows.insert(p.row);
        cols.insert(p.col);
    }
    std::map<int, int> row_rank;
    std::map<int, int> col_rank;
    for (int r : rows) row_rank.emplace(r, static_cast<int>(row_rank.size()));
    for (int c : cols) col_rank.emplace(c, static_cast<int>(col_rank.size()));

    LayoutGrid layout;
    layout.rows = static_cast<int>(rows.size());
    layout.cols = static_cast<int>(cols.size());
    for (const auto& p : selected) layout.cells.push_back({row_rank[p.row], col_rank[p.col], p});
    std::sort(layout.cells.begin(), layout.cells.end(), [](const auto& a, const auto& b) {
        return std::pair(a.layout_row, a.layout_col) < std::pair(b.layout_row, b.layout_col);
    });
    return layout;
}

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

}  // namespace

PipelineOutput run_pipeline(const Query& query, const ImageInput& image,
                            const PipelineConfig& config, const Providers& providers) {
    staged("config", [&] { config.fusion.validate(); });
    if (!providers.embedder) throw Error(ErrorCode::config_error, "no embedding provider");
    if (config.use_detection && !providers.detector) {
        throw Error(ErrorCode::config_error, "no detection provider");
    }

    PatchGrid grid = staged("grid", [&] {
        return build_grid(image.dims, config.crop_px, config.ratio_k);
    });

    Image padded;
    const Image* pixels = nullptr;
    if (image.pixels != nullptr) {
        if (image.pixels->dims() != image.dims) {
            throw Error(ErrorCode::invalid_argument, "image pixels do not match dims")
                .with_stage("grid");
        }
        padded = pad_replicate(*image.pixels, grid.padded_dims());
        pixels = &padded;
    }

    ScoreMap semantic = staged("semantic", [&] {
        if (!config.use_coarse) {
            return similarity_map(query, grid, Lattice::low, *providers.embedder, pixels);
        }
        return multi_resolution_map(query, grid, *providers.embedder, pixels);
    });

    WindowPlan plan = staged("windows", [&] {
        return plan_windows(grid, config.window_w, config.window_h, config.stride_x,
                            config.stride_y);
    });

    std::optional<ObjectSet> objects;
    std::optional<ScoreMap> detection;
    if (config.use_detection) {
        objects = staged("extract", [&] {
            if (providers.extractor) return extract_objects(query, *providers.extractor);
            return heuristic_objects(query);
        });
        detection = staged("detect", [&] {
            return detection_map(grid, plan, *objects, *providers.detector, config.detection,
                                 pixels);
        });
    }

    RetrievalResult result = staged("fuse", [&] {
        RetrievalResult r;
        r.fused_map = detection ? fuse_maps(semantic, *detection, config.fusion.weight_w)
                                : semantic;
        r.selected = select_top_k(r.fused_map, config.fusion.top_k);
        std::vector<PatchIndex> idx;
        idx.reserve(r.selected.size());
        for (const auto& s : r.selected) idx.push_back(s.index);
        r.layout = spatial_layout(idx);
        return r;
    });

    return PipelineOutput{std::move(grid),      std::move(plan),      std::move(objects),
                          std::move(semantic),  std::move(detection), std::move(result)};
}

}  // namespace mrd

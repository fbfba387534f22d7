#pragma once

// Test doubles and brute-force reference implementations shared by the unit
// and acceptance tests. The references deliberately avoid the engine's own
// helpers (no coarse_parent, no patch_rect) so they check it independently.

#include "mrd/detect.hpp"
#include "mrd/error.hpp"
#include "mrd/grid.hpp"
#include "mrd/providers.hpp"
#include "mrd/score_map.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace mrd::testing {

/// Error code raised by f, or nullopt when it returns normally.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Embeds crops through a callback on the crop rect; the query is (1, 0).
class FnEmbedder final : public EmbeddingProvider {
public:
    using Fn = std::function<Embedding(const PixelRect&)>;
    explicit FnEmbedder(Fn fn, Embedding query = {{1.0, 0.0}}) : fn_(std::move(fn)), query_(std::move(query)) {}

    Embedding embed_query(const Query&) override { return query_; }
    std::vector<Embedding> embed_crops(std::span<const CropView> crops) override {
        std::vector<Embedding> out;
        for (const auto& c : crops) out.push_back(fn_(c.rect));
        ++calls;
        return out;
    }

    int calls = 0;

private:
    Fn fn_;
    Embedding query_;
};

/// Embedding whose cosine01 against (1, 0) is exactly `sim` for sim in
/// {0, 0.5, 1}, and within an ulp or two otherwise.
inline Embedding embedding_for(double sim) {
    const double c = 2.0 * sim - 1.0;
    return {{c, std::sqrt(std::max(0.0, 1.0 - c * c))}};
}

/// Returns a fixed list of window-local detections per window index.
class ListDetector final : public DetectorProvider {
public:
    explicit ListDetector(std::vector<std::vector<Detection>> per_window)
        : per_window_(std::move(per_window)) {}

    std::vector<Detection> detect(const CropView&, const ObjectSet&, double) override {
        if (next_ >= per_window_.size()) return {};
        return per_window_[next_++];
    }

private:
    std::vector<std::vector<Detection>> per_window_;
    std::size_t next_ = 0;
};

/// Global-frame boxes; each window receives the clipped, window-local part.
class GlobalBoxDetector final : public DetectorProvider {
public:
    explicit GlobalBoxDetector(std::vector<Detection> boxes) : boxes_(std::move(boxes)) {}

    std::vector<Detection> detect(const CropView& window, const ObjectSet&, double) override {
        std::vector<Detection> out;
        for (const auto& d : boxes_) {
            const PixelRect c = intersection(d.box, window.rect);
            if (c.empty()) continue;
            out.push_back({c.translated(-window.rect.x0, -window.rect.y0), d.score, d.label,
                           BoxFrame::window_local});
        }
        return out;
    }

private:
    std::vector<Detection> boxes_;
};

class ThrowingDetector final : public DetectorProvider {
public:
    explicit ThrowingDetector(std::size_t fail_at) : fail_at_(fail_at) {}
    std::vector<Detection> detect(const CropView&, const ObjectSet&, double) override {
        if (seen_++ == fail_at_) throw Error(ErrorCode::provider_error, "detector down");
        return {};
    }

private:
    std::size_t fail_at_;
    std::size_t seen_ = 0;
};

class FixedExtractor final : public ObjectExtractorProvider {
public:
    explicit FixedExtractor(std::vector<std::string> labels) : labels_(std::move(labels)) {}
    std::vector<std::string> extract(const Query&) override { return labels_; }

private:
    std::vector<std::string> labels_;
};

inline ScoreMap random_map(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (auto& x : v) x = u(rng);
    return ScoreMap(rows, cols, std::move(v));
}

// Reference implementations ---------------------------------------------------

/// Low map fused with the coarse map: parent found by integer division.
inline std::vector<double> oracle_multires(const std::vector<double>& low, int rows, int cols,
                                           const std::vector<double>& coarse, int coarse_cols, int k) {
    std::vector<double> out(low.size());
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double s = low[static_cast<std::size_t>(i) * cols + j];
            const double hi = coarse[static_cast<std::size_t>(i / k) * coarse_cols + j / k];
            out[static_cast<std::size_t>(i) * cols + j] = std::sqrt(hi * s);
        }
    }
    return out;
}

/// For each patch: enumerate every window, test containment, take the max
/// of the boxes overlapping the patch inside that window, then average.
/// Boxes are global; the per-window view is the clip to the window.
inline std::vector<double> oracle_detection(int rows, int cols, int crop,
                                            const std::vector<PixelRect>& windows,
                                            const std::vector<Detection>& boxes, double tau) {
    std::vector<double> out(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const int px0 = j * crop, py0 = i * crop, px1 = px0 + crop, py1 = py0 + crop;
            double sum = 0.0;
            int covering = 0;
            for (const auto& w : windows) {
                const bool inside = px0 >= w.x0 && py0 >= w.y0 && px1 <= w.x1 && py1 <= w.y1;
                if (!inside) continue;
                ++covering;
                double best = 0.0;
                for (const auto& b : boxes) {
                    if (!(b.score > tau)) continue;
                    const int cx0 = std::max(b.box.x0, w.x0), cy0 = std::max(b.box.y0, w.y0);
                    const int cx1 = std::min(b.box.x1, w.x1), cy1 = std::min(b.box.y1, w.y1);
                    if (cx0 >= cx1 || cy0 >= cy1) continue;
                    const bool overlap = cx0 < px1 && px0 < cx1 && cy0 < py1 && py0 < cy1;
                    if (overlap) best = std::max(best, b.score);
                }
                sum += best;
            }
            out[static_cast<std::size_t>(i) * cols + j] = covering ? sum / covering : -1.0;
        }
    }
    return out;
}

}  // namespace mrd::testing

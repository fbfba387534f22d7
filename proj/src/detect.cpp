#include "mrd/detect.hpp"

#include "mrd/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string_view>

namespace mrd {

// ---------------------------------------------------------------------------
// Object extraction

namespace {

const std::set<std::string_view>& stopwords() {
    static const std::set<std::string_view> words = {
        // interrogatives
        "what", "which", "who", "whom", "whose", "where", "when", "why", "how",
        // auxiliaries
        "is", "are", "was", "were", "be", "been", "being", "am", "do", "does", "did", "can",
        "could", "will", "would", "should", "shall", "may", "might", "must", "has", "have", "had",
        // determiners and pronouns
        "a", "an", "the", "this", "that", "these", "those", "it", "its", "there", "their",
        "they", "them", "i", "you", "we", "he", "she", "his", "her", "my", "your", "our", "me",
        "any", "some", "each", "every", "all", "both", "other", "another", "one",
        // prepositions and spatial words
        "of", "in", "on", "at", "to", "from", "with", "by", "for", "about", "near", "behind",
        "under", "above", "below", "between", "left", "right", "side", "front", "back", "top",
        "bottom", "inside", "outside", "next", "into", "onto", "over", "beside", "around",
        "relative", "position", "located", "closer", "farther", "than",
        // conjunctions and particles
        "and", "or", "but", "not", "no", "yes", "if", "so", "as", "then", "also",
        // attribute words
        "color", "colour", "shape", "size", "kind", "type", "many", "much", "number", "material",
        "brand", "text", "written", "say", "says", "made", "wearing", "holding",
        // image words
        "image", "picture", "photo", "shown", "visible", "see", "seen", "object", "thing",
        "things", "appear", "appears"};
    return words;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && cur.substr(cur.size() - 2) == "'s") cur.resize(cur.size() - 2);
        while (!cur.empty() && cur.back() == '\'') cur.pop_back();
        if (!cur.empty()) tokens.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || (ch == '\'' && !cur.empty())) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace

ObjectSet heuristic_objects(const Query& query) {
    std::vector<std::string> keep;
    for (auto& tok : tokenize(query.text())) {
        if (stopwords().count(tok) != 0) continue;
        if (std::all_of(tok.begin(), tok.end(),
                        [](unsigned char c) { return std::isdigit(c) != 0; })) {
            continue;
        }
        keep.push_back(std::move(tok));
    }
    if (ObjectSet::normalize(keep).empty()) keep = {query.text()};
    return ObjectSet(keep);
}

ObjectSet extract_objects(const Query& query, ObjectExtractorProvider& extractor) {
    auto labels = ObjectSet::normalize(extractor.extract(query));
    if (labels.empty()) return heuristic_objects(query);
    return ObjectSet(labels);
}

// ---------------------------------------------------------------------------
// Windows

namespace {

std::vector<int> axis_origins(int extent, int window, int stride) {
    std::vector<int> origins;
    int o = 0;
    while (o + window < extent) {
        origins.push_back(o);
        o += stride;
    }
    origins.push_back(extent - window);
    return origins;
}

int snap(int px, int crop) { return std::max(crop, px / crop * crop); }

}  // namespace

WindowPlan plan_windows(const PatchGrid& grid, int window_w, int window_h, int stride_x,
                        int stride_y) {
    if (window_w < 1 || window_h < 1) invalid_argument("window size must be positive");
    if (stride_x < 1 || stride_y < 1) invalid_argument("window stride must be positive");

    const int crop = grid.crop_px();
    const auto padded = grid.padded_dims();
    WindowPlan plan;
    plan.window_w = std::min(snap(window_w, crop), padded.width_px);
    plan.window_h = std::min(snap(window_h, crop), padded.height_px);
    plan.stride_x = std::min(snap(stride_x, crop), plan.window_w);
    plan.stride_y = std::min(snap(stride_y, crop), plan.window_h);

    const auto xs = axis_origins(padded.width_px, plan.window_w, plan.stride_x);
    const auto ys = axis_origins(padded.height_px, plan.window_h, plan.stride_y);
    plan.windows.reserve(xs.size() * ys.size());
    for (int y : ys) {
        for (int x : xs) plan.windows.push_back({x, y, x + plan.window_w, y + plan.window_h});
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Confidence maps

std::vector<Detection> filter_detections(std::span<const Detection> dets, double tau) {
    std::vector<Detection> out;
    for (const auto& d : dets) {
        if (d.score > tau) out.push_back(d);
    }
    return out;
}

ScoreMap window_confidence_map(const PixelRect& window, std::span<const Detection> dets,
                               const PatchGrid& grid, CoverageRule rule) {
    const int crop = grid.crop_px();
    if (window.empty() || window.x0 % crop || window.y0 % crop || window.width() % crop ||
        window.height() % crop || !grid.padded_rect().contains(window)) {
        invalid_argument("window is not aligned to the patch lattice");
    }
    const int rows = window.height() / crop;
    const int cols = window.width() / crop;
    const PixelRect local{0, 0, window.width(), window.height()};
    std::vector<double> cells(static_cast<std::size_t>(rows) * cols, 0.0);

    for (const auto& d : dets) {
        PixelRect box = d.box;
        if (d.frame == BoxFrame::global) box = box.translated(-window.x0, -window.y0);
        if (box.empty() || !local.contains(box)) invalid_argument("detection box outside window");
        if (!(d.score >= 0.0 && d.score <= 1.0)) invalid_argument("detection score outside [0,1]");

        const int r0 = box.y0 / crop;
        const int r1 = (box.y1 - 1) / crop;
        const int c0 = box.x0 / crop;
        const int c1 = (box.x1 - 1) / crop;
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                if (rule == CoverageRule::center_point) {
                    const double cx = c * crop + crop / 2.0;
                    const double cy = r * crop + crop / 2.0;
                    if (cx < box.x0 || cx >= box.x1 || cy < box.y0 || cy >= box.y1) continue;
                }
                auto& cell = cells[static_cast<std::size_t>(r) * cols + c];
                cell = std::max(cell, d.score);
            }
        }
    }
    return ScoreMap(rows, cols, std::move(cells));
}

ScoreMap global_confidence_map(const WindowPlan& plan, std::span<const ScoreMap> per_window,
                               const PatchGrid& grid) {
    if (per_window.size() != plan.windows.size()) {
        invalid_argument("expected " + std::to_string(plan.windows.size()) +
                         " window maps, got " + std::to_string(per_window.size()));
    }
    const int crop = grid.crop_px();
    const int rows = grid.grid_h();
    const int cols = grid.grid_w();
    std::vector<double> sum(static_cast<std::size_t>(rows) * cols, 0.0);
    std::vector<int> count(sum.size(), 0);
    std::vector<double> lo(sum.size(), 1.0);
    std::vector<double> hi(sum.size(), 0.0);

    for (std::size_t t = 0; t < plan.windows.size(); ++t) {
        const auto& w = plan.windows[t];
        const auto& m = per_window[t];
        if (w.x0 % crop || w.y0 % crop || !grid.padded_rect().contains(w) ||
            m.rows() * crop != w.height() || m.cols() * crop != w.width()) {
            invalid_argument("window map " + std::to_string(t) + " does not match its window");
        }
        const int r_off = w.y0 / crop;
        const int c_off = w.x0 / crop;
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) {
                const auto g = static_cast<std::size_t>(r + r_off) * cols + (c + c_off);
                const double v = m.at(r, c);
                sum[g] += v;
                lo[g] = std::min(lo[g], v);
                hi[g] = std::max(hi[g], v);
                ++count[g];
            }
        }
    }

    std::vector<double> out(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (count[i] == 0) {
            invalid_argument("window plan leaves patch (" + std::to_string(i / cols) + "," +
                             std::to_string(i % cols) + ") uncovered");
        }
        out[i] = std::clamp(sum[i] / count[i], lo[i], hi[i]);
    }
    return ScoreMap(rows, cols, std::move(out));
}

ScoreMap detection_map(const PatchGrid& grid, const WindowPlan& plan, const ObjectSet& objects,
                       DetectorProvider& detector, const DetectionSettings& settings,
                       const Image* image) {
    std::vector<ScoreMap> maps;
    maps.reserve(plan.windows.size());
    for (std::size_t t = 0; t < plan.windows.size(); ++t) {
        std::vector<Detection> raw;
        try {
            raw = detector.detect({plan.windows[t], image}, objects, settings.tau_det);
        } catch (const Error& e) {
            throw Error(e.code() == ErrorCode::protocol_error ? e.code()
                                                              : ErrorCode::provider_error,
                        "detecting in window " + std::to_string(t) + ": " + e.what(), e.detail());
        }
        const auto kept = filter_detections(raw, settings.tau_det);
        maps.push_back(window_confidence_map(plan.windows[t], kept, grid, settings.rule));
    }
    return global_confidence_map(plan, maps, grid);
}

}  // namespace mrd

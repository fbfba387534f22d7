#include "mrd/error.hpp"
#include "mrd/providers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t rect_key(const PixelRect& r) {
    std::uint64_t h = 0;
    for (int v : {r.x0, r.y0, r.x1, r.y1}) {
        h = splitmix64(h ^ static_cast<std::uint32_t>(v));
    }
    return h;
}

double unit_noise(std::uint64_t seed, std::uint64_t key) {
    return static_cast<double>(splitmix64(seed ^ splitmix64(key)) >> 11) * 0x1.0p-53;
}

PatchRect to_patch_units(const PixelRect& r, int crop_px) {
    const double s = crop_px;
    return {r.x0 / s, r.y0 / s, r.x1 / s, r.y1 / s};
}

double overlap_area(const PatchRect& a, const PatchRect& b) {
    const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    return (w > 0 && h > 0) ? w * h : 0.0;
}

bool encloses(const PatchRect& outer, const PatchRect& inner) {
    return inner.x0 >= outer.x0 && inner.y0 >= outer.y0 && inner.x1 <= outer.x1 &&
           inner.y1 <= outer.y1;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void SyntheticSceneSpec::validate() const {
    if (grid_h < 1 || grid_w < 1) invalid_argument("scene grid must be positive");
    if (!in_unit(background_level)) invalid_argument("background_level must be in [0,1]");
    if (!in_unit(noise_level)) invalid_argument("noise_level must be in [0,1]");
    for (const auto& t : targets) {
        const auto& r = t.rect;
        if (!(r.x0 >= 0 && r.y0 >= 0 && r.x1 <= grid_w && r.y1 <= grid_h && r.x0 < r.x1 &&
              r.y0 < r.y1)) {
            invalid_argument("target '" + t.label + "' rect outside scene grid");
        }
        if (!in_unit(t.coherence)) invalid_argument("target coherence must be in [0,1]");
        if (t.label.empty()) invalid_argument("target label must be non-empty");
    }
}

PixelRect SyntheticSceneSpec::target_pixels(const SceneTarget& t, int crop_px) const {
    const double s = crop_px;
    return {static_cast<int>(std::floor(t.rect.x0 * s)), static_cast<int>(std::floor(t.rect.y0 * s)),
            static_cast<int>(std::ceil(t.rect.x1 * s)), static_cast<int>(std::ceil(t.rect.y1 * s))};
}

std::vector<PatchIndex> SyntheticSceneSpec::target_cells() const {
    std::vector<PatchIndex> cells;
    for (int r = 0; r < grid_h; ++r) {
        for (int c = 0; c < grid_w; ++c) {
            const PatchRect cell{double(c), double(r), double(c + 1), double(r + 1)};
            const bool hit = std::any_of(targets.begin(), targets.end(), [&](const auto& t) {
                return !t.distractor && overlap_area(cell, t.rect) > 0.0;
            });
            if (hit) cells.push_back({r, c});
        }
    }
    return cells;
}

double synthetic_similarity(const SyntheticSceneSpec& spec, const PatchRect& crop,
                            std::uint64_t noise_key) {
    const double boost = 1.0 - spec.background_level;
    double best = 0.0;
    for (const auto& t : spec.targets) {
        const double inter = overlap_area(crop, t.rect);
        if (inter <= 0.0) continue;
        const double contrib =
            encloses(crop, t.rect) ? boost : t.coherence * (inter / crop.area()) * boost;
        best = std::max(best, contrib);
    }
    const double noise = spec.noise_level * unit_noise(spec.noise_seed, noise_key);
    return std::clamp(spec.background_level + best + noise, 0.0, 1.0);
}

namespace {

class SyntheticEmbedder final : public EmbeddingProvider {
public:
    SyntheticEmbedder(SyntheticSceneSpec spec, int crop_px)
        : spec_(std::move(spec)), crop_px_(crop_px) {}

    Embedding embed_query(const Query&) override { return {{1.0, 0.0}}; }

    std::vector<Embedding> embed_crops(std::span<const CropView> crops) override {
        std::vector<Embedding> out;
        out.reserve(crops.size());
        for (const auto& crop : crops) {
            const double sim =
                synthetic_similarity(spec_, to_patch_units(crop.rect, crop_px_), rect_key(crop.rect));
            // cos = 2 sim - 1 against the query direction (1, 0).
            const double cos = 2.0 * sim - 1.0;
            out.push_back({{cos, std::sqrt(std::max(0.0, 1.0 - cos * cos))}});
        }
        return out;
    }

private:
    SyntheticSceneSpec spec_;
    int crop_px_;
};

class SyntheticDetector final : public DetectorProvider {
public:
    SyntheticDetector(SyntheticSceneSpec spec, int crop_px)
        : spec_(std::move(spec)), crop_px_(crop_px) {}

    std::vector<Detection> detect(const CropView& window, const ObjectSet&, double) override {
        std::vector<Detection> out;
        for (const auto& t : spec_.targets) {
            if (t.distractor) continue;
            const PixelRect clipped = intersection(spec_.target_pixels(t, crop_px_), window.rect);
            if (clipped.empty()) continue;
            out.push_back({clipped.translated(-window.rect.x0, -window.rect.y0),
                           0.5 + 0.5 * t.coherence, t.label, BoxFrame::window_local});
        }
        return out;
    }

private:
    SyntheticSceneSpec spec_;
    int crop_px_;
};

class SyntheticExtractor final : public ObjectExtractorProvider {
public:
    explicit SyntheticExtractor(SyntheticSceneSpec spec) : spec_(std::move(spec)) {}

    std::vector<std::string> extract(const Query&) override {
        std::vector<std::string> labels;
        for (const auto& t : spec_.targets) {
            if (!t.distractor) labels.push_back(t.label);
        }
        return labels;
    }

private:
    SyntheticSceneSpec spec_;
};

}  // namespace

std::shared_ptr<EmbeddingProvider> synthetic_embedder(SyntheticSceneSpec spec, int crop_px) {
    spec.validate();
    if (crop_px < 1) invalid_argument("crop_px must be >= 1");
    return std::make_shared<SyntheticEmbedder>(std::move(spec), crop_px);
}

std::shared_ptr<DetectorProvider> synthetic_detector(SyntheticSceneSpec spec, int crop_px) {
    spec.validate();
    if (crop_px < 1) invalid_argument("crop_px must be >= 1");
    return std::make_shared<SyntheticDetector>(std::move(spec), crop_px);
}

std::shared_ptr<ObjectExtractorProvider> synthetic_extractor(SyntheticSceneSpec spec) {
    spec.validate();
    return std::make_shared<SyntheticExtractor>(std::move(spec));
}

Providers synthetic_providers(const SyntheticSceneSpec& spec, int crop_px) {
    return {synthetic_embedder(spec, crop_px), synthetic_detector(spec, crop_px),
            synthetic_extractor(spec)};
}

}  // namespace mrd

#pragma once

#include "mrd/grid.hpp"
#include "mrd/image.hpp"
#include "mrd/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mrd {

/// A crop handed to a provider. `rect` is in padded-image pixels. `image`
/// is the padded image and may be null for geometry-only runs; providers
/// that need pixels must reject such requests.
struct CropView {
    PixelRect rect;
    const Image* image = nullptr;
};

/// Implementations must tolerate concurrent calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Embedding embed_query(const Query& query) = 0;
    /// Order-preserving and all-or-nothing.
    virtual std::vector<Embedding> embed_crops(std::span<const CropView> crops) = 0;
};

class DetectorProvider {
public:
    virtual ~DetectorProvider() = default;
    /// Boxes come back in window-local pixels.
    virtual std::vector<Detection> detect(const CropView& window, const ObjectSet& labels,
                                          double threshold) = 0;
};

class ObjectExtractorProvider {
public:
    virtual ~ObjectExtractorProvider() = default;
    /// Raw labels; normalization and fallback happen in extract_objects.
    virtual std::vector<std::string> extract(const Query& query) = 0;
};

struct Providers {
    std::shared_ptr<EmbeddingProvider> embedder;
    std::shared_ptr<DetectorProvider> detector;
    std::shared_ptr<ObjectExtractorProvider> extractor;  // optional
};

// ---------------------------------------------------------------------------
// Synthetic scenes

/// Axis-aligned rectangle in low-lattice patch units (may be fractional).
struct PatchRect {
    double x0 = 0;
    double y0 = 0;
    double x1 = 0;
    double y1 = 0;

    double area() const noexcept { return (x1 - x0) * (y1 - y0); }
    friend bool operator==(const PatchRect&, const PatchRect&) = default;
};

struct SceneTarget {
    PatchRect rect;
    std::string label;
    double coherence = 1.0;
    /// Looks relevant to the embedder but is ignored by the detector and by
    /// recall scoring.
    bool distractor = false;

    friend bool operator==(const SceneTarget&, const SceneTarget&) = default;
};

struct SyntheticSceneSpec {
    std::string scene_id;
    int grid_h = 0;
    int grid_w = 0;
    std::vector<SceneTarget> targets;
    std::uint64_t noise_seed = 0;
    double background_level = 0.0;
    /// Amplitude of the per-crop additive noise in [0, noise_level).
    double noise_level = 0.0;
    std::string query;

    void validate() const;

    /// Pixel rectangle of a target at a given low crop size.
    PixelRect target_pixels(const SceneTarget& t, int crop_px) const;

    /// Low cells overlapped by any non-distractor target.
    std::vector<PatchIndex> target_cells() const;

    friend bool operator==(const SyntheticSceneSpec&, const SyntheticSceneSpec&) = default;
};

/// Similarity the synthetic embedder assigns to a crop, given in patch units.
///
/// Per target: 0 if disjoint, the full boost (1 - background_level) if the
/// crop contains the whole target, otherwise coherence * coverage * boost,
/// where coverage is the fraction of the crop the target covers. The best
/// target wins; seeded noise is added and the result clamped to [0, 1].
double synthetic_similarity(const SyntheticSceneSpec& spec, const PatchRect& crop,
                            std::uint64_t noise_key);

std::shared_ptr<EmbeddingProvider> synthetic_embedder(SyntheticSceneSpec spec, int crop_px);
std::shared_ptr<DetectorProvider> synthetic_detector(SyntheticSceneSpec spec, int crop_px);
/// Returns the non-distractor target labels.
std::shared_ptr<ObjectExtractorProvider> synthetic_extractor(SyntheticSceneSpec spec);

Providers synthetic_providers(const SyntheticSceneSpec& spec, int crop_px);

}  // namespace mrd

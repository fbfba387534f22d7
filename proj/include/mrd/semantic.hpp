#pragma once

#include "mrd/grid.hpp"
#include "mrd/providers.hpp"
#include "mrd/score_map.hpp"
#include "mrd/types.hpp"

#include <span>
#include <vector>

namespace mrd {

/// Cosine similarity rescaled to [0, 1]: (1 + cos(a, b)) / 2.
/// Throws invalid_argument on a dimension mismatch and degenerate_input on a
/// zero-norm (or non-finite) vector.
double cosine_similarity01(const Embedding& a, const Embedding& b);

/// Per-patch similarity between the query and every crop of one lattice.
/// Crops are requested one at a time, cut from `image` when given (padded
/// coordinates). A provider failure is rethrown naming the failed patch and
/// no partial map is returned.
ScoreMap similarity_map(const Query& query, const PatchGrid& grid, Lattice lattice,
                        EmbeddingProvider& embedder, const Image* image = nullptr);

/// Replicates each coarse value into its k x k block of low cells.
ScoreMap upsample_coarse(const ScoreMap& coarse, const PatchGrid& grid);

/// Elementwise sqrt(a * b), no range checks. Shared by consistency_fuse and
/// by tests that probe scaling behaviour outside [0, 1].
std::vector<double> geometric_mean(std::span<const double> a, std::span<const double> b);

ScoreMap consistency_fuse(const ScoreMap& low, const ScoreMap& coarse_upsampled);

/// consistency_fuse(low map, upsample_coarse(coarse map)).
ScoreMap multi_resolution_map(const Query& query, const PatchGrid& grid,
                              EmbeddingProvider& embedder, const Image* image = nullptr);

}  // namespace mrd

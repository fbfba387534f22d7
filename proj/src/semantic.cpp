#include "mrd/semantic.hpp"

#include "mrd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrd {

double cosine_similarity01(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        invalid_argument("embedding dimensions differ: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
    }
    if (a.dim() == 0) invalid_argument("empty embedding");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (!std::isfinite(dot) || !std::isfinite(na) || !std::isfinite(nb)) {
        fail(ErrorCode::degenerate_input, "embedding contains non-finite values");
    }
    if (na == 0.0 || nb == 0.0) fail(ErrorCode::degenerate_input, "zero-norm embedding");
    const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    return 0.5 * (1.0 + cos);
}

ScoreMap similarity_map(const Query& query, const PatchGrid& grid, Lattice lattice,
                        EmbeddingProvider& embedder, const Image* image) {
    const int rows = grid.rows(lattice);
    const int cols = grid.cols(lattice);

    const char* which = lattice == Lattice::low ? "low" : "coarse";
    Embedding q;
    try {
        q = embedder.embed_query(query);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("embedding query: ") + e.what(), e.detail());
    }

    std::vector<double> values(grid.cell_count(lattice));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto at = [&] {
                return std::string(which) + " patch (" + std::to_string(r) + "," +
                       std::to_string(c) + "): ";
            };
            const CropView crop{grid.patch_rect({r, c}, lattice), image};
            std::vector<Embedding> got;
            try {
                got = embedder.embed_crops(std::span<const CropView>(&crop, 1));
            } catch (const Error& e) {
                throw Error(e.code() == ErrorCode::protocol_error ? e.code()
                                                                  : ErrorCode::provider_error,
                            "embedding " + at() + e.what(), e.detail());
            }
            if (got.size() != 1) {
                throw Error(ErrorCode::protocol_error,
                            "embedding " + at() + "expected 1 embedding, got " +
                                std::to_string(got.size()));
            }
            try {
                values[static_cast<std::size_t>(r) * cols + c] = cosine_similarity01(q, got[0]);
            } catch (const Error& e) {
                throw Error(ErrorCode::provider_error, "bad embedding for " + at() + e.what());
            }
        }
    }
    return ScoreMap(rows, cols, std::move(values));
}

ScoreMap upsample_coarse(const ScoreMap& coarse, const PatchGrid& grid) {
    if (coarse.rows() != grid.coarse_h() || coarse.cols() != grid.coarse_w()) {
        invalid_argument("coarse map is " + std::to_string(coarse.rows()) + "x" +
                         std::to_string(coarse.cols()) + ", grid expects " +
                         std::to_string(grid.coarse_h()) + "x" + std::to_string(grid.coarse_w()));
    }
    const int rows = grid.grid_h();
    const int cols = grid.grid_w();
    const int k = grid.ratio_k();
    std::vector<double> out(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            out[static_cast<std::size_t>(r) * cols + c] = coarse.at(r / k, c / k);
        }
    }
    return ScoreMap(rows, cols, std::move(out));
}

std::vector<double> geometric_mean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) invalid_argument("geometric_mean: length mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::sqrt(a[i] * b[i]);
    return out;
}

ScoreMap consistency_fuse(const ScoreMap& low, const ScoreMap& coarse_upsampled) {
    require_same_shape(low, coarse_upsampled, "consistency_fuse");
    return ScoreMap(low.rows(), low.cols(),
                    geometric_mean(low.values(), coarse_upsampled.values()));
}

ScoreMap multi_resolution_map(const Query& query, const PatchGrid& grid,
                              EmbeddingProvider& embedder, const Image* image) {
    const ScoreMap low = similarity_map(query, grid, Lattice::low, embedder, image);
    const ScoreMap coarse = similarity_map(query, grid, Lattice::coarse, embedder, image);
    return consistency_fuse(low, upsample_coarse(coarse, grid));
}

}  // namespace mrd

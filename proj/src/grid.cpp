#include "mrd/grid.hpp"

#include "mrd/error.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <string>

namespace mrd {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::degenerate_input: return "degenerate-input";
        case ErrorCode::provider_error: return "provider-error";
        case ErrorCode::protocol_error: return "protocol-error";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::config_error: return "config-error";
    }
    return "unknown";
}

PixelRect intersection(const PixelRect& a, const PixelRect& b) noexcept {
    PixelRect r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                std::min(a.y1, b.y1)};
    if (r.empty()) return {};
    return r;
}

std::ostream& operator<<(std::ostream& os, const PixelRect& r) {
    return os << '[' << r.x0 << ',' << r.y0 << ',' << r.x1 << ',' << r.y1 << ')';
}

std::ostream& operator<<(std::ostream& os, const PatchIndex& p) {
    return os << '(' << p.row << ',' << p.col << ')';
}

namespace {

int ceil_div(std::int64_t a, std::int64_t b) {
    return static_cast<int>((a + b - 1) / b);
}

}  // namespace

PatchGrid::PatchGrid(ImageDims dims, int crop_px, int ratio_k)
    : dims_(dims), crop_px_(crop_px), ratio_k_(ratio_k) {
    if (dims.width_px < 1 || dims.height_px < 1) {
        invalid_argument("image dimensions must be positive, got " +
                         std::to_string(dims.width_px) + "x" + std::to_string(dims.height_px));
    }
    if (crop_px < 1) invalid_argument("crop_px must be >= 1, got " + std::to_string(crop_px));
    if (ratio_k < 2) invalid_argument("ratio_k must be >= 2, got " + std::to_string(ratio_k));

    const std::int64_t block = static_cast<std::int64_t>(crop_px) * ratio_k;
    coarse_w_ = ceil_div(dims.width_px, block);
    coarse_h_ = ceil_div(dims.height_px, block);
    const std::int64_t pw = coarse_w_ * block;
    const std::int64_t ph = coarse_h_ * block;
    if (pw > std::numeric_limits<int>::max() || ph > std::numeric_limits<int>::max()) {
        invalid_argument("padded image size overflows");
    }
    padded_ = {static_cast<int>(pw), static_cast<int>(ph)};
}

PixelRect PatchGrid::patch_rect(PatchIndex idx, Lattice l) const {
    if (!valid(idx, l)) {
        invalid_argument("patch index (" + std::to_string(idx.row) + "," +
                         std::to_string(idx.col) + ") outside " +
                         (l == Lattice::low ? "low" : "coarse") + " lattice");
    }
    const int side = l == Lattice::low ? crop_px_ : coarse_px();
    return {idx.col * side, idx.row * side, (idx.col + 1) * side, (idx.row + 1) * side};
}

std::vector<PatchIndex> PatchGrid::coarse_children(PatchIndex coarse) const {
    if (!valid(coarse, Lattice::coarse)) {
        invalid_argument("coarse index (" + std::to_string(coarse.row) + "," +
                         std::to_string(coarse.col) + ") outside coarse lattice");
    }
    std::vector<PatchIndex> out;
    out.reserve(static_cast<std::size_t>(ratio_k_) * ratio_k_);
    for (int dr = 0; dr < ratio_k_; ++dr) {
        for (int dc = 0; dc < ratio_k_; ++dc) {
            out.push_back({coarse.row * ratio_k_ + dr, coarse.col * ratio_k_ + dc});
        }
    }
    return out;
}

PatchIndex PatchGrid::coarse_parent(PatchIndex low) const {
    if (!valid(low, Lattice::low)) invalid_argument("low index outside lattice");
    return {low.row / ratio_k_, low.col / ratio_k_};
}

PatchIndex PatchGrid::pixel_to_patch(int x, int y) const {
    if (!padded_rect().contains(x, y)) {
        invalid_argument("pixel (" + std::to_string(x) + "," + std::to_string(y) +
                         ") outside padded image");
    }
    return {y / crop_px_, x / crop_px_};
}

PatchGrid build_grid(ImageDims dims, int crop_px, int ratio_k) {
    return PatchGrid(dims, crop_px, ratio_k);
}

PatchGrid grid_for_cells(int grid_h, int grid_w, int crop_px, int ratio_k) {
    if (grid_h < 1 || grid_w < 1) invalid_argument("grid dimensions must be positive");
    if (ratio_k >= 2 && (grid_h % ratio_k != 0 || grid_w % ratio_k != 0)) {
        invalid_argument("grid " + std::to_string(grid_h) + "x" + std::to_string(grid_w) +
                         " is not a multiple of ratio_k " + std::to_string(ratio_k));
    }
    if (crop_px < 1) invalid_argument("crop_px must be >= 1");
    const std::int64_t w = static_cast<std::int64_t>(grid_w) * crop_px;
    const std::int64_t h = static_cast<std::int64_t>(grid_h) * crop_px;
    if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max()) {
        invalid_argument("grid pixel size overflows");
    }
    return PatchGrid({static_cast<int>(w), static_cast<int>(h)}, crop_px, ratio_k);
}

}  // namespace mrd

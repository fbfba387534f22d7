#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mrd {

struct ImageDims {
    int width_px = 0;
    int height_px = 0;

    friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Zero-based (row, col) cell of either patch lattice.
struct PatchIndex {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const PatchIndex&, const PatchIndex&) = default;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
    std::int64_t area() const noexcept {
        return static_cast<std::int64_t>(width()) * height();
    }
    bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
    bool contains(int x, int y) const noexcept {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }
    bool contains(const PixelRect& o) const noexcept {
        return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1;
    }
    bool intersects(const PixelRect& o) const noexcept {
        return o.x0 < x1 && x0 < o.x1 && o.y0 < y1 && y0 < o.y1;
    }
    PixelRect translated(int dx, int dy) const noexcept {
        return {x0 + dx, y0 + dy, x1 + dx, y1 + dy};
    }

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

PixelRect intersection(const PixelRect& a, const PixelRect& b) noexcept;
std::ostream& operator<<(std::ostream& os, const PixelRect& r);
std::ostream& operator<<(std::ostream& os, const PatchIndex& p);

enum class Lattice { low, coarse };

/// Geometry of the two proportional patch lattices over one image.
///
/// The low lattice has cells of crop_px pixels; the coarse lattice has cells
/// of ratio_k * crop_px pixels, each covering a k x k block of low cells. The
/// image is conceptually padded on the right and bottom up to a whole number
/// of coarse cells, so low_rows * low_cols == k^2 * coarse_rows * coarse_cols
/// always holds.
class PatchGrid {
public:
    PatchGrid(ImageDims dims, int crop_px, int ratio_k);

    const ImageDims& dims() const noexcept { return dims_; }
    const ImageDims& padded_dims() const noexcept { return padded_; }
    int crop_px() const noexcept { return crop_px_; }
    int coarse_px() const noexcept { return crop_px_ * ratio_k_; }
    int ratio_k() const noexcept { return ratio_k_; }

    int grid_w() const noexcept { return coarse_w_ * ratio_k_; }
    int grid_h() const noexcept { return coarse_h_ * ratio_k_; }
    int coarse_w() const noexcept { return coarse_w_; }
    int coarse_h() const noexcept { return coarse_h_; }

    int rows(Lattice l) const noexcept { return l == Lattice::low ? grid_h() : coarse_h_; }
    int cols(Lattice l) const noexcept { return l == Lattice::low ? grid_w() : coarse_w_; }
    std::size_t cell_count(Lattice l) const noexcept {
        return static_cast<std::size_t>(rows(l)) * static_cast<std::size_t>(cols(l));
    }

    bool valid(PatchIndex idx, Lattice l) const noexcept {
        return idx.row >= 0 && idx.col >= 0 && idx.row < rows(l) && idx.col < cols(l);
    }

    PixelRect patch_rect(PatchIndex idx, Lattice l = Lattice::low) const;

    /// The k^2 low cells of a coarse cell, row-major within the block.
    std::vector<PatchIndex> coarse_children(PatchIndex coarse) const;

    PatchIndex coarse_parent(PatchIndex low) const;

    /// Low cell containing a pixel of the padded image.
    PatchIndex pixel_to_patch(int x, int y) const;

    PixelRect padded_rect() const noexcept { return {0, 0, padded_.width_px, padded_.height_px}; }

    friend bool operator==(const PatchGrid&, const PatchGrid&) = default;

private:
    ImageDims dims_;
    int crop_px_;
    int ratio_k_;
    int coarse_w_;
    int coarse_h_;
    ImageDims padded_;
};

PatchGrid build_grid(ImageDims dims, int crop_px, int ratio_k);

/// Grid whose padded extent equals a given low-lattice cell count; used by
/// geometry-only runs (synthetic scenes) that have no decoded image.
PatchGrid grid_for_cells(int grid_h, int grid_w, int crop_px, int ratio_k);

}  // namespace mrd

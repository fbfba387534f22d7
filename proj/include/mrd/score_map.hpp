#pragma once

#include "mrd/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mrd {

/// Row-major rows x cols map of values in [0, 1]. Holds semantic similarity,
/// detection confidence, and fused maps alike. Values are kept in double
/// precision; serialization narrows them.
class ScoreMap {
public:
    ScoreMap() = default;
    ScoreMap(int rows, int cols, std::vector<double> values);

    static ScoreMap zeros(int rows, int cols);
    static ScoreMap filled(int rows, int cols, double value);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double at(int row, int col) const;
    double at(PatchIndex idx) const { return at(idx.row, idx.col); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const ScoreMap& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    friend bool operator==(const ScoreMap&, const ScoreMap&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

void require_same_shape(const ScoreMap& a, const ScoreMap& b, const char* what);

}  // namespace mrd

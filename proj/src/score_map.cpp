#include "mrd/score_map.hpp"

#include "mrd/error.hpp"

#include <cmath>
#include <string>

namespace mrd {

ScoreMap::ScoreMap(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 1 || cols < 1) invalid_argument("score map dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        invalid_argument("score map expects " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " values, got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            invalid_argument("score map value " + std::to_string(v) + " at " + std::to_string(i) +
                             " outside [0,1]");
        }
    }
}

ScoreMap ScoreMap::zeros(int rows, int cols) { return filled(rows, cols, 0.0); }

ScoreMap ScoreMap::filled(int rows, int cols, double value) {
    if (rows < 1 || cols < 1) invalid_argument("score map dimensions must be positive");
    return ScoreMap(rows, cols,
                    std::vector<double>(static_cast<std::size_t>(rows) * cols, value));
}

double ScoreMap::at(int row, int col) const {
    if (row < 0 || col < 0 || row >= rows_ || col >= cols_) {
        invalid_argument("score map index out of range");
    }
    return values_[static_cast<std::size_t>(row) * cols_ + col];
}

void require_same_shape(const ScoreMap& a, const ScoreMap& b, const char* what) {
    if (!a.same_shape(b)) {
        invalid_argument(std::string(what) + ": map shapes differ (" + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()) + ")");
    }
}

}  // namespace mrd

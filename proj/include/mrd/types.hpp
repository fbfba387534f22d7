#pragma once

#include "mrd/grid.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mrd {

/// A query or crop embedding. Dimension is fixed by whichever provider
/// produced it.
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Free-text question, non-empty after trimming.
class Query {
public:
    explicit Query(std::string text);
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

/// Normalized detection targets: non-empty, lowercase, trimmed, unique,
/// first-occurrence order.
class ObjectSet {
public:
    explicit ObjectSet(const std::vector<std::string>& raw);

    /// Same normalization, but an empty result is allowed.
    static std::vector<std::string> normalize(const std::vector<std::string>& raw);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }

    friend bool operator==(const ObjectSet&, const ObjectSet&) = default;

private:
    std::vector<std::string> labels_;
};

enum class BoxFrame { window_local, global };

struct Detection {
    PixelRect box;
    double score = 0.0;
    std::string label;
    BoxFrame frame = BoxFrame::window_local;

    friend bool operator==(const Detection&, const Detection&) = default;
};

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace mrd

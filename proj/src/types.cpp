#include "mrd/types.hpp"

#include "mrd/error.hpp"

#include <algorithm>
#include <cctype>

namespace mrd {

std::string trim(std::string_view s) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Query::Query(std::string text) : text_(std::move(text)) {
    if (trim(text_).empty()) invalid_argument("query must be non-empty");
}

std::vector<std::string> ObjectSet::normalize(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        std::string label = to_lower(trim(r));
        if (label.empty()) continue;
        if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(std::move(label));
    }
    return out;
}

ObjectSet::ObjectSet(const std::vector<std::string>& raw) : labels_(normalize(raw)) {
    if (labels_.empty()) invalid_argument("object set must contain at least one label");
}

}  // namespace mrd

#include "geoalert/pattern.hpp"

#include <algorithm>

#include "geoalert/errors.hpp"

namespace geoalert {

Pattern::Pattern(std::string symbols) : symbols_(std::move(symbols)) {
    for (char c : symbols_) {
        if (c != '0' && c != '1' && c != kStar) {
            throw ParameterError("pattern symbol '" + std::string(1, c) + "' is not one of 0, 1, *");
        }
    }
}

std::size_t Pattern::non_star_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(symbols_.begin(), symbols_.end(), [](char c) { return c != kStar; }));
}

bool Pattern::has_stars() const noexcept { return symbols_.find(kStar) != std::string::npos; }

Pattern make_index(std::string_view s) {
    Pattern p{std::string(s)};
    if (p.has_stars()) {
        throw ParameterError("index '" + p.str() + "' contains a wildcard");
    }
    return p;
}

}  // namespace geoalert

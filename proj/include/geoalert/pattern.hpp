#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

namespace geoalert {

inline constexpr char kStar = '*';

// Fixed-width string over {0,1,*}. Used for cell indexes (no stars), HVE
// search tokens and expanded codewords.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::string symbols);

    static Pattern wildcard(std::size_t width) { return Pattern(std::string(width, kStar)); }

    std::size_t width() const noexcept { return symbols_.size(); }
    const std::string& str() const noexcept { return symbols_; }
    char operator[](std::size_t i) const { return symbols_[i]; }

    // Positions that carry a concrete bit; each one costs one pairing set at query time.
    std::size_t non_star_count() const noexcept;
    bool has_stars() const noexcept;

    auto operator<=>(const Pattern&) const = default;

private:
    std::string symbols_;
};

inline std::ostream& operator<<(std::ostream& os, const Pattern& p) { return os << p.str(); }

// Throws ParameterError unless `s` is a star-free bit string.
Pattern make_index(std::string_view s);

}  // namespace geoalert

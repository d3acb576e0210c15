#include "geoalert/tokens.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "geoalert/errors.hpp"

namespace geoalert {

LeafMatch index_to_codeword(const Pattern& index, const CodingTree& coding) {
    if (index.width() != coding.bit_width() || index.has_stars()) {
        throw LookupError(fmt::format("'{}' is not a {}-bit cell index", index.str(), coding.bit_width()));
    }
    const auto symbols = coding.index_symbols(index);
    if (!symbols) {
        throw LookupError(fmt::format("'{}' is not a valid expanded index", index.str()));
    }
    for (std::size_t len = 1; len <= symbols->size(); ++len) {
        const auto pos = coding.position_of_code(symbols->substr(0, len));
        if (!pos) continue;
        const CodingLeaf& leaf = coding.leaf_order()[*pos];
        if (leaf.index != index) break;
        return LeafMatch{leaf.codeword, *pos, leaf.cell_id};
    }
    throw LookupError(fmt::format("index '{}' does not belong to any leaf", index.str()));
}

namespace {

std::size_t common_prefix(const std::string& a, const std::string& b) {
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && a[k] == b[k] && a[k] != kStar) ++k;
    return k;
}

}  // namespace

TokenSet minimize_tokens(std::span<const Pattern> alert_indexes, const CodingTree& coding) {
    TokenSet out;
    if (alert_indexes.empty()) return out;

    std::vector<LeafMatch> leaves;
    leaves.reserve(alert_indexes.size());
    for (const Pattern& idx : alert_indexes) {
        leaves.push_back(index_to_codeword(idx, coding));
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const LeafMatch& a, const LeafMatch& b) { return a.position < b.position; });
    leaves.erase(std::unique(leaves.begin(), leaves.end(),
                             [](const LeafMatch& a, const LeafMatch& b) { return a.position == b.position; }),
                 leaves.end());

    std::vector<int> ids;
    for (const LeafMatch& m : leaves) ids.push_back(m.cell_id);
    out.source_zone = AlertZone::of(std::move(ids), coding.leaf_order().size());

    const auto width = static_cast<std::size_t>(coding.symbol_width());
    std::size_t begin = 0;
    while (begin < leaves.size()) {
        std::size_t end = begin + 1;
        while (end < leaves.size() && leaves[end].position == leaves[end - 1].position + 1) ++end;

        // Leaf order is lexicographic, so the common prefix of a run is that of its ends.
        std::size_t i = begin;
        while (i < end) {
            std::size_t len = end - i;
            bool merged = false;
            for (; len > 1; --len) {
                const std::size_t k = common_prefix(leaves[i].codeword, leaves[i + len - 1].codeword);
                std::string code = leaves[i].codeword.substr(0, k);
                code.resize(width, kStar);
                const auto count = coding.leaf_count(code);
                if (count && *count == len) {
                    out.tokens.push_back(coding.expanded(code));
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                out.tokens.push_back(coding.expanded(leaves[i].codeword));
                len = 1;
            }
            i += len;
        }
        begin = end;
    }
    return out;
}

TokenSet minimize_tokens(const AlertZone& zone, const CellIndexMap& indexes, const CodingTree& coding) {
    std::vector<Pattern> alert;
    alert.reserve(zone.cell_ids.size());
    for (int id : zone.cell_ids) alert.push_back(indexes.index_of(id));
    TokenSet out = minimize_tokens(alert, coding);
    out.source_zone = zone;
    return out;
}

namespace {

struct Implicant {
    std::uint64_t value;  // fixed bits; star positions are 0
    std::uint64_t stars;
    bool operator==(const Implicant&) const = default;
};

struct ImplicantHash {
    std::size_t operator()(const Implicant& i) const noexcept {
        return std::hash<std::uint64_t>{}(i.value * 0x9e3779b97f4a7c15ULL ^ i.stars);
    }
};

std::uint64_t to_bits(const Pattern& p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < p.width(); ++i) v = (v << 1) | (p[i] == '1' ? 1U : 0U);
    return v;
}

Pattern to_pattern(const Implicant& imp, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << (width - 1 - i);
        if (imp.stars & bit) {
            s[i] = kStar;
        } else if (imp.value & bit) {
            s[i] = '1';
        }
    }
    return Pattern(std::move(s));
}

std::vector<Implicant> prime_implicants(const std::vector<std::uint64_t>& minterms, std::size_t width) {
    std::unordered_set<Implicant, ImplicantHash> level;
    for (std::uint64_t m : minterms) level.insert({m, 0});
    std::vector<Implicant> primes;
    while (!level.empty()) {
        std::unordered_set<Implicant, ImplicantHash> next;
        std::unordered_set<Implicant, ImplicantHash> merged;
        for (const Implicant& imp : level) {
            for (std::size_t b = 0; b < width; ++b) {
                const std::uint64_t bit = std::uint64_t{1} << b;
                if ((imp.stars & bit) || (imp.value & bit)) continue;
                const Implicant partner{imp.value | bit, imp.stars};
                if (level.contains(partner)) {
                    next.insert({imp.value, imp.stars | bit});
                    merged.insert(imp);
                    merged.insert(partner);
                }
            }
        }
        for (const Implicant& imp : level) {
            if (!merged.contains(imp)) primes.push_back(imp);
        }
        level = std::move(next);
    }
    return primes;
}

}  // namespace

TokenSet fixed_length_minimize(std::span<const Pattern> alert_indexes) {
    TokenSet out;
    if (alert_indexes.empty()) return out;
    const std::size_t width = alert_indexes.front().width();
    if (width == 0 || width > 64) {
        throw ParameterError(fmt::format("fixed-length minimization supports widths 1..64, got {}", width));
    }
    std::vector<std::uint64_t> minterms;
    for (const Pattern& p : alert_indexes) {
        if (p.width() != width || p.has_stars()) {
            throw ParameterError("fixed-length minimization needs equal-width star-free indexes");
        }
        minterms.push_back(to_bits(p));
    }
    std::sort(minterms.begin(), minterms.end());
    minterms.erase(std::unique(minterms.begin(), minterms.end()), minterms.end());

    std::vector<Implicant> primes = prime_implicants(minterms, width);
    std::sort(primes.begin(), primes.end(), [&](const Implicant& a, const Implicant& b) {
        return to_pattern(a, width) < to_pattern(b, width);
    });

    // covers[p] = minterm slots of prime p; cover_count[m] = primes covering m.
    std::vector<std::vector<std::size_t>> covers(primes.size());
    std::vector<std::vector<std::size_t>> covered_by(minterms.size());
    for (std::size_t p = 0; p < primes.size(); ++p) {
        for (std::size_t m = 0; m < minterms.size(); ++m) {
            if ((minterms[m] & ~primes[p].stars) == primes[p].value) {
                covers[p].push_back(m);
                covered_by[m].push_back(p);
            }
        }
    }
    auto cost = [&](std::size_t p) {
        return width - static_cast<std::size_t>(std::popcount(primes[p].stars));
    };

    std::vector<bool> done(minterms.size(), false);
    std::vector<bool> chosen(primes.size(), false);
    std::size_t remaining = minterms.size();
    auto take = [&](std::size_t p) {
        chosen[p] = true;
        for (std::size_t m : covers[p]) {
            if (!done[m]) {
                done[m] = true;
                --remaining;
            }
        }
    };
    for (std::size_t m = 0; m < minterms.size(); ++m) {
        if (covered_by[m].size() == 1 && !chosen[covered_by[m].front()]) take(covered_by[m].front());
    }
    while (remaining > 0) {
        std::size_t best = primes.size();
        std::size_t best_new = 0;
        for (std::size_t p = 0; p < primes.size(); ++p) {
            if (chosen[p]) continue;
            std::size_t fresh = 0;
            for (std::size_t m : covers[p]) fresh += done[m] ? 0 : 1;
            if (fresh == 0) continue;
            if (best == primes.size()) {
                best = p;
                best_new = fresh;
                continue;
            }
            // fresh / (cost + 1) compared by cross-multiplication; +1 is the per-token pairing.
            const std::size_t lhs = fresh * (cost(best) + 1);
            const std::size_t rhs = best_new * (cost(p) + 1);
            if (lhs > rhs || (lhs == rhs && cost(p) < cost(best))) {
                best = p;
                best_new = fresh;
            }
        }
        take(best);
    }

    // Drop selections made redundant by later picks, most expensive first.
    std::vector<std::size_t> picked;
    for (std::size_t p = 0; p < primes.size(); ++p) {
        if (chosen[p]) picked.push_back(p);
    }
    std::stable_sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) { return cost(a) > cost(b); });
    std::vector<std::size_t> multiplicity(minterms.size(), 0);
    for (std::size_t p : picked) {
        for (std::size_t m : covers[p]) ++multiplicity[m];
    }
    for (std::size_t p : picked) {
        const bool redundant = std::all_of(covers[p].begin(), covers[p].end(),
                                           [&](std::size_t m) { return multiplicity[m] > 1; });
        if (redundant) {
            chosen[p] = false;
            for (std::size_t m : covers[p]) --multiplicity[m];
        }
    }

    for (std::size_t p = 0; p < primes.size(); ++p) {
        if (chosen[p]) out.tokens.push_back(to_pattern(primes[p], width));
    }
    return out;
}

TokenSet fixed_length_minimize(const AlertZone& zone, const CellIndexMap& indexes) {
    std::vector<Pattern> alert;
    alert.reserve(zone.cell_ids.size());
    for (int id : zone.cell_ids) alert.push_back(indexes.index_of(id));
    TokenSet out = fixed_length_minimize(alert);
    out.source_zone = zone;
    return out;
}

TokenSet per_cell_tokens(const AlertZone& zone, const CellIndexMap& indexes) {
    TokenSet out;
    for (int id : zone.cell_ids) out.tokens.push_back(indexes.index_of(id));
    out.source_zone = zone;
    return out;
}

bool token_matches(const Pattern& token, const Pattern& index) {
    if (token.width() != index.width()) {
        throw ParameterError(fmt::format("token width {} differs from index width {}", token.width(), index.width()));
    }
    for (std::size_t i = 0; i < token.width(); ++i) {
        if (token[i] != kStar && token[i] != index[i]) return false;
    }
    return true;
}

Coverage coverage_oracle(const TokenSet& tokens, const CellIndexMap& indexes) {
    Coverage out;
    for (std::size_t c = 0; c < indexes.size(); ++c) {
        const Pattern& idx = indexes.index_of(static_cast<int>(c));
        const bool hit = std::any_of(tokens.tokens.begin(), tokens.tokens.end(),
                                     [&](const Pattern& t) { return token_matches(t, idx); });
        if (!hit) continue;
        out.covered.insert(static_cast<int>(c));
        if (!tokens.source_zone.contains(static_cast<int>(c))) {
            out.false_positives.insert(static_cast<int>(c));
        }
    }
    return out;
}

std::size_t pairing_cost(std::span<const Pattern> tokens) {
    std::size_t total = 0;
    for (const Pattern& t : tokens) total += t.non_star_count();
    return total;
}

}  // namespace geoalert

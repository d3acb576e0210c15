#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geoalert/coding.hpp"
#include "geoalert/grid.hpp"
#include "geoalert/pattern.hpp"

namespace geoalert {

struct TokenSet {
    std::vector<Pattern> tokens;
    // Cells the tokens were generated for. Left empty when built from bare
    // fixed-length indexes with no map to resolve them.
    AlertZone source_zone;
};

struct LeafMatch {
    std::string codeword;  // symbol level, '*'-padded
    std::size_t position = 0;  // in CodingTree::leaf_order()
    int cell_id = 0;
};

// The unique leaf whose code is a prefix of the index. Throws LookupError when
// the index is not one the coding tree hands out.
LeafMatch index_to_codeword(const Pattern& index, const CodingTree& coding);

// Deterministic minimization: leaves sorted by tree position, split into runs
// of consecutive positions, and each run covered greedily by the largest
// leading block that is exactly the leaf set of one subtree.
TokenSet minimize_tokens(std::span<const Pattern> alert_indexes, const CodingTree& coding);
TokenSet minimize_tokens(const AlertZone& zone, const CellIndexMap& indexes, const CodingTree& coding);

// Exact-cover binary minimization of equal-width indexes (Quine-McCluskey
// prime implicants, essential primes, then greedy cover by cells per pairing
// set). Never covers an index outside the input. Width <= 64.
TokenSet fixed_length_minimize(std::span<const Pattern> alert_indexes);
TokenSet fixed_length_minimize(const AlertZone& zone, const CellIndexMap& indexes);

// One full-width token per alert cell.
TokenSet per_cell_tokens(const AlertZone& zone, const CellIndexMap& indexes);

// True iff every non-star token position equals the index bit.
bool token_matches(const Pattern& token, const Pattern& index);

struct Coverage {
    std::set<int> covered;
    std::set<int> false_positives;
};

// Brute force over every cell index of the map.
Coverage coverage_oracle(const TokenSet& tokens, const CellIndexMap& indexes);

// Pairing sets: one per non-star position over all tokens.
std::size_t pairing_cost(std::span<const Pattern> tokens);
inline std::size_t pairing_cost(const TokenSet& tokens) { return pairing_cost(tokens.tokens); }

}  // namespace geoalert

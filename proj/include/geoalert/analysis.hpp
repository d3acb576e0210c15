#pragma once

#include <cstddef>
#include <optional>

#include "geoalert/coding.hpp"
#include "geoalert/grid.hpp"

namespace geoalert {

// Encryption-width overhead of a variable-length tree against fixed-length codes.
struct OverheadReport {
    std::size_t n = 0;
    int arity = 2;
    int rl = 0;
    int fixed_width = 0;  // ceil(log_B n) symbols, at least 1
    int le = 0;           // extra ciphertext bits
    int depth_bound = 0;
    std::optional<double> golden_bound;  // unset when some cell has zero weight
};

// Smallest k with base^k >= n (0 for n <= 1).
int ceil_log(std::size_t n, int base);

// ceil((n-1)/(B-1)): the deepest a B-ary Huffman tree over n leaves can be.
int depth_upper_bound(std::size_t n, int arity);

// log_phi(1/p_min) with phi the golden ratio. Throws ParameterError unless 0 < p_min <= 1.
double golden_ratio_bound(double p_min);

// Binary: RL - ceil(log2 n). B-ary: B * (RL - ceil(log_B n)), the expanded bit
// difference. Throws ParameterError if `arity` is not the tree's arity.
int le_overhead(const PrefixTree& tree, int arity);

// Upper-bound estimate of E[L_E(n)] by direct summation. n >= 2.
double expected_le_estimate(std::size_t n);
// Same quantity with the harmonic sum replaced by ln(n-1) + gamma + 1/(2(n-1)).
double expected_le_harmonic_approx(std::size_t n);

// Shannon entropy of the normalized weights, in base-`base` digits.
double entropy(const ProbabilityGrid& grid, double base = 2.0);

// Sum of B^-l over the tree's cell leaves.
double kraft_sum(const PrefixTree& tree);

OverheadReport overhead_report(const PrefixTree& tree, const ProbabilityGrid& grid);

}  // namespace geoalert

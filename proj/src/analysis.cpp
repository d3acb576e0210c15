#include "geoalert/analysis.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geoalert/errors.hpp"

namespace geoalert {

int ceil_log(std::size_t n, int base) {
    if (base < 2) throw ParameterError("logarithm base must be >= 2");
    int k = 0;
    for (std::size_t v = 1; v < n; v *= static_cast<std::size_t>(base)) ++k;
    return k;
}

int depth_upper_bound(std::size_t n, int arity) {
    if (n == 0 || arity < 2) throw ParameterError("need n >= 1 and B >= 2");
    const std::size_t b1 = static_cast<std::size_t>(arity) - 1;
    return static_cast<int>((n - 1 + b1 - 1) / b1);
}

double golden_ratio_bound(double p_min) {
    if (!(p_min > 0.0) || p_min > 1.0) {
        throw ParameterError(fmt::format("minimum probability {} outside (0, 1]", p_min));
    }
    return std::log(1.0 / p_min) / std::log(std::numbers::phi);
}

int le_overhead(const PrefixTree& tree, int arity) {
    if (arity != tree.arity()) {
        throw ParameterError(fmt::format("arity {} does not match the tree's arity {}", arity, tree.arity()));
    }
    const int fixed = std::max(1, ceil_log(tree.cell_count(), arity));
    const int diff = tree.reference_length() - fixed;
    return arity == 2 ? diff : arity * diff;
}

namespace {

// sum_{i=2}^{n} i * ceil(log_i n)
long double log_ceiling_sum(std::size_t n) {
    long double s = 0;
    for (std::size_t i = 2; i <= n; ++i) {
        s += static_cast<long double>(i) * ceil_log(n, static_cast<int>(std::min<std::size_t>(i, 1u << 30)));
    }
    return s;
}

}  // namespace

double expected_le_estimate(std::size_t n) {
    if (n < 2) throw ParameterError("expected L_E needs n >= 2");
    const auto m = static_cast<long double>(n - 1);
    long double first = 0;
    long double second = 0;
    for (std::size_t i = 2; i <= n; ++i) {
        const auto li = static_cast<long double>(i);
        first += li * m / (li - 1);
        second += li;
    }
    return static_cast<double>((first + second - log_ceiling_sum(n)) / m);
}

double expected_le_harmonic_approx(std::size_t n) {
    if (n < 2) throw ParameterError("expected L_E needs n >= 2");
    const auto m = static_cast<long double>(n - 1);
    const auto nn = static_cast<long double>(n);
    const long double harmonic = std::log(m) + std::numbers::egamma_v<long double> + 1.0L / (2.0L * m);
    const long double first = m * (m + harmonic);
    const long double second = (nn * nn + nn - 2.0L) / 2.0L;
    return static_cast<double>((first + second - log_ceiling_sum(n)) / m);
}

double entropy(const ProbabilityGrid& grid, double base) {
    double h = 0.0;
    for (double w : grid.weights()) {
        const double p = w / grid.total_weight();
        if (p > 0.0) h -= p * std::log(p);
    }
    return h / std::log(base);
}

double kraft_sum(const PrefixTree& tree) {
    double s = 0.0;
    for (std::size_t leaf : tree.leaf_order()) {
        const TreeNode& n = tree.node(leaf);
        if (!n.cell_id) continue;
        s += std::pow(static_cast<double>(tree.arity()), -static_cast<double>(tree.effective_code(leaf).size()));
    }
    return s;
}

OverheadReport overhead_report(const PrefixTree& tree, const ProbabilityGrid& grid) {
    OverheadReport r;
    r.n = tree.cell_count();
    r.arity = tree.arity();
    r.rl = tree.reference_length();
    r.fixed_width = std::max(1, ceil_log(r.n, r.arity));
    r.le = le_overhead(tree, r.arity);
    r.depth_bound = depth_upper_bound(r.n, r.arity);
    const double p_min = grid.min_weight() / grid.total_weight();
    if (p_min > 0.0) r.golden_bound = golden_ratio_bound(p_min);
    return r;
}

}  // namespace geoalert

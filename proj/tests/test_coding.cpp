#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "geoalert/coding.hpp"
#include "geoalert/errors.hpp"
#include "geoalert/random.hpp"

using namespace geoalert;

namespace {

// Five-cell example grid. Cell 0 outweighs cell 1 here.
ProbabilityGrid five_cells() { return ProbabilityGrid::from_weights({0.2, 0.1, 0.5, 0.4, 0.6}); }

std::vector<std::string> leaf_codes(const PrefixTree& t) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < t.cell_count(); ++c) out.push_back(t.effective_code(t.leaf_of(static_cast<int>(c))));
    return out;
}

ProbabilityGrid random_grid(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (double& x : w) x = 0.01 + uniform01(rng);
    return ProbabilityGrid::from_weights(w);
}

// Minimum of sum w_i l_i over every length vector that satisfies Kraft in base
// B. Lengths are assigned non-decreasing to weights sorted descending, which
// loses nothing (exchange argument), so non-decreasing vectors are enough.
double brute_force_optimal_cost(std::vector<double> w, int b) {
    std::sort(w.begin(), w.end(), std::greater<>());
    const int n = static_cast<int>(w.size());
    const int max_len = std::max(1, n - 1);
    double best = INFINITY;
    std::vector<int> len(static_cast<std::size_t>(n), 1);
    std::function<void(int, int, double)> rec = [&](int i, int lo, double kraft) {
        if (kraft > 1.0 + 1e-12) return;
        if (i == n) {
            double cost = 0;
            for (int k = 0; k < n; ++k) cost += w[static_cast<std::size_t>(k)] * len[static_cast<std::size_t>(k)];
            best = std::min(best, cost);
            return;
        }
        for (int l = lo; l <= max_len; ++l) {
            len[static_cast<std::size_t>(i)] = l;
            rec(i + 1, l, kraft + std::pow(b, -l));
        }
    };
    rec(0, 1, 0.0);
    return best;
}

double weighted_length(const PrefixTree& t, const ProbabilityGrid& g) {
    double s = 0;
    for (std::size_t c = 0; c < t.cell_count(); ++c) {
        s += g.weight(static_cast<int>(c)) * static_cast<double>(t.node(t.leaf_of(static_cast<int>(c))).code.size());
    }
    return s;
}

void expect_prefix_free(const PrefixTree& t) {
    const auto codes = leaf_codes(t);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t j = 0; j < codes.size(); ++j) {
            if (i == j) continue;
            ASSERT_FALSE(codes[j].starts_with(codes[i])) << codes[i] << " prefixes " << codes[j];
        }
    }
}

}  // namespace

TEST(Huffman, WorkedExampleMergeOrder) {
    const PrefixTree t = build_huffman_tree(five_cells());
    std::vector<double> merged;
    for (std::size_t id : t.internal_nodes()) merged.push_back(t.node(id).weight);
    ASSERT_EQ(merged.size(), 4u);
    EXPECT_NEAR(merged[0], 0.3, 1e-12);
    EXPECT_NEAR(merged[1], 0.7, 1e-12);
    EXPECT_NEAR(merged[2], 1.1, 1e-12);
    EXPECT_NEAR(merged[3], 1.8, 1e-12);
    EXPECT_EQ(t.reference_length(), 3);
}

TEST(Huffman, WorkedExampleCodes) {
    const PrefixTree t = build_huffman_tree(five_cells());
    EXPECT_EQ(leaf_codes(t), (std::vector<std::string>{"001", "000", "10", "01", "11"}));
    EXPECT_EQ(t.node(t.root()).code, "");
}

TEST(Huffman, UniformFourIsComplete) {
    const PrefixTree t = build_huffman_tree(ProbabilityGrid::from_weights({1, 1, 1, 1}));
    for (const auto& c : leaf_codes(t)) EXPECT_EQ(c.size(), 2u);
    EXPECT_DOUBLE_EQ(average_code_length(t, ProbabilityGrid::from_weights({1, 1, 1, 1})), 2.0);
}

TEST(Huffman, SingleCell) {
    const auto g = ProbabilityGrid::from_weights({0.7});
    const PrefixTree t = build_huffman_tree(g);
    EXPECT_EQ(t.reference_length(), 1);
    EXPECT_EQ(t.node(t.root()).code, "");
    EXPECT_EQ(make_cell_indexes(t).index_of(0).str(), "0");
    const CodingTree ct = make_coding_tree(t);
    ASSERT_EQ(ct.leaf_order().size(), 1u);
    EXPECT_EQ(ct.leaf_order()[0].codeword, "0");
    EXPECT_DOUBLE_EQ(average_code_length(t, g), 1.0);
}

TEST(Huffman, InternalWeightIsChildSum) {
    Rng rng(5);
    const PrefixTree t = build_huffman_tree(random_grid(rng, 40));
    for (const TreeNode& n : t.nodes()) {
        if (n.is_leaf()) continue;
        double s = 0;
        for (std::size_t c : n.children) s += t.node(c).weight;
        EXPECT_NEAR(n.weight, s, 1e-12);
    }
}

TEST(Huffman, OptimalAgainstBruteForce) {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + uniform_below(rng, 7);  // 2..8
        const auto g = random_grid(rng, n);
        const std::vector<double> w(g.weights().begin(), g.weights().end());
        EXPECT_NEAR(weighted_length(build_huffman_tree(g), g), brute_force_optimal_cost(w, 2), 1e-9) << "n=" << n;
    }
}

TEST(BaryHuffman, OptimalAgainstBruteForce) {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + uniform_below(rng, 6);  // 3..8
        const int b = 3 + static_cast<int>(uniform_below(rng, 2));
        if (static_cast<std::size_t>(b) > n) continue;
        const auto g = random_grid(rng, n);
        const std::vector<double> w(g.weights().begin(), g.weights().end());
        EXPECT_NEAR(weighted_length(build_bary_huffman_tree(g, b), g), brute_force_optimal_cost(w, b), 1e-9)
            << "n=" << n << " B=" << b;
    }
}

TEST(BaryHuffman, TernaryWorkedExample) {
    const PrefixTree t = build_bary_huffman_tree(five_cells(), 3);
    const auto internal = t.internal_nodes();
    ASSERT_EQ(internal.size(), 2u);
    const TreeNode& r1 = t.node(internal[0]);
    std::vector<int> grouped;
    for (std::size_t c : r1.children) grouped.push_back(*t.node(c).cell_id);
    EXPECT_EQ(grouped, (std::vector<int>{1, 0, 3}));  // v2, v1, v4
    EXPECT_EQ(internal[1], t.root());
    EXPECT_EQ(r1.code, "0");
    EXPECT_EQ(leaf_codes(t), (std::vector<std::string>{"01", "00", "1", "02", "2"}));
    EXPECT_EQ(t.reference_length(), 2);
}

TEST(BaryHuffman, ThreeCellsThreeWay) {
    const PrefixTree t = build_bary_huffman_tree(ProbabilityGrid::from_weights({0.3, 0.2, 0.5}), 3);
    EXPECT_EQ(t.reference_length(), 1);
    auto codes = leaf_codes(t);
    std::sort(codes.begin(), codes.end());
    EXPECT_EQ(codes, (std::vector<std::string>{"0", "1", "2"}));
}

TEST(BaryHuffman, BinaryDelegates) {
    Rng rng(9);
    const auto g = random_grid(rng, 30);
    EXPECT_EQ(leaf_codes(build_bary_huffman_tree(g, 2)), leaf_codes(build_huffman_tree(g)));
}

TEST(BaryHuffman, ArityRange) {
    const auto g = five_cells();
    EXPECT_THROW(build_bary_huffman_tree(g, 1), ParameterError);
    EXPECT_THROW(build_bary_huffman_tree(g, 6), ParameterError);
    EXPECT_NO_THROW(build_bary_huffman_tree(g, 5));
}

TEST(BaryHuffman, DummiesCarryNoCells) {
    // n=6, B=4: (6-1) mod 3 = 2, so one dummy completes the first merge.
    const PrefixTree t = build_bary_huffman_tree(ProbabilityGrid::from_weights({1, 2, 3, 4, 5, 6}), 4);
    std::size_t dummies = 0;
    for (const TreeNode& n : t.nodes()) dummies += n.is_dummy() ? 1 : 0;
    EXPECT_EQ(dummies, 1u);
    EXPECT_EQ(t.cell_count(), 6u);
    const CodingTree ct = make_coding_tree(t);
    EXPECT_EQ(ct.leaf_order().size(), 6u);
    EXPECT_EQ(ct.leaf_count(std::string(static_cast<std::size_t>(t.reference_length()), kStar)), 6u);
}

TEST(Balanced, DepthPattern) {
    const PrefixTree four = build_balanced_tree(ProbabilityGrid::from_weights({4, 1, 3, 2}));
    for (const auto& c : leaf_codes(four)) EXPECT_EQ(c.size(), 2u);

    const PrefixTree five = build_balanced_tree(five_cells());
    std::vector<std::size_t> depth;
    for (const auto& c : leaf_codes(five)) depth.push_back(c.size());
    // The two lightest cells (v2 = 0.1, v1 = 0.2) are paired first and sit deepest.
    EXPECT_EQ(depth, (std::vector<std::size_t>{3, 3, 2, 2, 2}));

    const PrefixTree one = build_balanced_tree(ProbabilityGrid::from_weights({2}));
    EXPECT_EQ(one.cell_count(), 1u);
    EXPECT_EQ(one.reference_length(), 1);
}

TEST(Balanced, CompleteTreeOfLogDepth) {
    for (std::size_t n = 2; n <= 130; ++n) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>((i * 37) % 11 + 1);
        const PrefixTree t = build_balanced_tree(ProbabilityGrid::from_weights(w));
        const int expect = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
        EXPECT_EQ(t.reference_length(), expect) << n;
        for (const auto& c : leaf_codes(t)) EXPECT_GE(static_cast<int>(c.size()), expect - 1) << n;
        expect_prefix_free(t);
    }
}

TEST(Builders, PrefixPropertyAndKraft) {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 60);
        const auto g = random_grid(rng, n);
        const PrefixTree h = build_huffman_tree(g);
        expect_prefix_free(h);
        expect_prefix_free(build_balanced_tree(g));
        expect_prefix_free(build_fixed_length(g).first);
        if (n >= 2) {
            double kraft = 0;
            for (const auto& c : leaf_codes(h)) kraft += std::pow(2.0, -static_cast<double>(c.size()));
            EXPECT_NEAR(kraft, 1.0, 1e-12);
        }
        for (int b = 3; b <= 5 && static_cast<std::size_t>(b) <= n; ++b) {
            const PrefixTree t = build_bary_huffman_tree(g, b);
            expect_prefix_free(t);
            double kraft = 0;
            for (const auto& c : leaf_codes(t)) kraft += std::pow(b, -static_cast<double>(c.size()));
            EXPECT_LE(kraft, 1.0 + 1e-12);
            if ((n - 1) % static_cast<std::size_t>(b - 1) == 0) {
                EXPECT_NEAR(kraft, 1.0, 1e-12);
            }
        }
    }
}

TEST(Builders, EmptyGridIsDimensionError) {
    EXPECT_THROW(ProbabilityGrid::from_weights({}), DimensionError);
}

TEST(Indexes, WorkedExample) {
    const CellIndexMap m = make_cell_indexes(build_huffman_tree(five_cells()));
    std::vector<std::string> got;
    for (const Pattern& p : m.indexes()) got.push_back(p.str());
    EXPECT_EQ(got, (std::vector<std::string>{"001", "000", "100", "010", "110"}));
    EXPECT_EQ(m.width(), 3u);
    EXPECT_EQ(m.cell_of(make_index("100")), 2);
    EXPECT_FALSE(m.cell_of(make_index("111")));
}

TEST(Indexes, TernaryPaddingExpansion) {
    const CellIndexMap m = make_cell_indexes(build_bary_huffman_tree(five_cells(), 3));
    EXPECT_EQ(m.width(), 6u);
    EXPECT_EQ(m.index_of(4).str(), "001000");  // v5, code "2" padded to "20"
    EXPECT_EQ(m.index_of(3).str(), "100001");  // v4, code "02"
}

TEST(Indexes, MapInvariants) {
    EXPECT_THROW(CellIndexMap({make_index("00"), make_index("1")}), ParameterError);
    EXPECT_THROW(CellIndexMap({Pattern("0*"), make_index("10")}), ParameterError);
    EXPECT_THROW(CellIndexMap({make_index("01"), make_index("01")}), ParameterError);
    EXPECT_THROW(CellIndexMap({}), DimensionError);
}

TEST(ExpandBary, Examples) {
    EXPECT_EQ(expand_bary("2*", 3, {}, ExpansionContext::Codeword).str(), "**1***");
    EXPECT_EQ(expand_bary("20", 3, {false, true}, ExpansionContext::Codeword).str(), "**1000");
    EXPECT_EQ(expand_bary("20", 3, {false, true}, ExpansionContext::Index).str(), "001000");
    EXPECT_EQ(expand_bary("0", 3, {}, ExpansionContext::Codeword).str(), "1**");
    EXPECT_EQ(expand_bary("0", 3, {}, ExpansionContext::Index).str(), "100");
    EXPECT_THROW(expand_bary("3", 3, {}, ExpansionContext::Codeword), ParameterError);
    EXPECT_THROW(expand_bary("x", 3, {}, ExpansionContext::Codeword), ParameterError);
    EXPECT_THROW(expand_bary("00", 3, {true}, ExpansionContext::Index), ParameterError);
}

TEST(CodingTree, WorkedExample) {
    const CodingTree ct = make_coding_tree(build_huffman_tree(five_cells()));
    const std::map<std::string, std::size_t> expect{{"00*", 2}, {"0**", 3}, {"1**", 2}, {"***", 5}};
    EXPECT_EQ(ct.parent_leaf_counts(), expect);
    std::vector<std::string> order;
    std::vector<int> cells;
    for (const CodingLeaf& l : ct.leaf_order()) {
        order.push_back(l.codeword);
        cells.push_back(l.cell_id);
    }
    EXPECT_EQ(order, (std::vector<std::string>{"000", "001", "01*", "10*", "11*"}));
    EXPECT_EQ(cells, (std::vector<int>{1, 0, 3, 2, 4}));
    EXPECT_EQ(ct.bit_width(), 3u);
}

TEST(CodingTree, UniformWidthsAndRootCount) {
    Rng rng(12);
    for (int b : {2, 3, 4}) {
        const auto g = random_grid(rng, 23);
        const PrefixTree t = b == 2 ? build_huffman_tree(g) : build_bary_huffman_tree(g, b);
        const CodingTree ct = make_coding_tree(t);
        for (const std::string& cw : ct.codewords()) {
            EXPECT_EQ(cw.size(), static_cast<std::size_t>(t.reference_length()));
            EXPECT_EQ(ct.expanded(cw).width(), ct.bit_width());
        }
        EXPECT_EQ(ct.leaf_count(std::string(static_cast<std::size_t>(t.reference_length()), kStar)), 23u);
    }
}

TEST(CodingTree, StrippedCodewordsRebuildIndexes) {
    Rng rng(13);
    for (int b : {2, 3, 4}) {
        const auto g = random_grid(rng, 37);
        const PrefixTree t = b == 2 ? build_huffman_tree(g) : build_bary_huffman_tree(g, b);
        const CellIndexMap m = make_cell_indexes(t);
        const CodingTree ct = make_coding_tree(t);
        for (const CodingLeaf& l : ct.leaf_order()) {
            std::string code = l.codeword;
            code.erase(std::find(code.begin(), code.end(), kStar), code.end());
            std::vector<bool> pad(static_cast<std::size_t>(t.reference_length()), false);
            for (std::size_t i = code.size(); i < pad.size(); ++i) pad[i] = true;
            code.resize(pad.size(), '0');
            const Pattern rebuilt = b == 2 ? make_index(code) : expand_bary(code, b, pad, ExpansionContext::Index);
            EXPECT_EQ(rebuilt, m.index_of(l.cell_id));
            EXPECT_EQ(rebuilt, l.index);
        }
    }
}

TEST(FixedLength, Widths) {
    auto [t5, m5] = build_fixed_length(five_cells());
    EXPECT_EQ(m5.width(), 3u);
    std::vector<std::string> got;
    for (const Pattern& p : m5.indexes()) got.push_back(p.str());
    EXPECT_EQ(got, (std::vector<std::string>{"000", "001", "010", "011", "100"}));
    EXPECT_EQ(t5.reference_length(), 3);
    EXPECT_EQ(build_fixed_length(ProbabilityGrid::from_weights({1, 1, 1, 1})).second.width(), 2u);
    EXPECT_EQ(build_fixed_length(ProbabilityGrid(32, 32, std::vector<double>(1024, 1.0))).second.width(), 10u);
    EXPECT_EQ(build_fixed_length(ProbabilityGrid::from_weights({1})).second.width(), 1u);
}

TEST(FixedLength, TrieLeavesMatchIndexes) {
    for (std::size_t n : {1u, 2u, 5u, 6u, 8u, 13u}) {
        const auto g = ProbabilityGrid::from_weights(std::vector<double>(n, 1.0));
        auto [t, m] = build_fixed_length(g);
        for (std::size_t c = 0; c < n; ++c) {
            EXPECT_EQ(t.effective_code(t.leaf_of(static_cast<int>(c))), m.index_of(static_cast<int>(c)).str());
        }
    }
}

TEST(AverageLength, WorkedExample) {
    const auto g = five_cells();
    EXPECT_NEAR(average_code_length(build_huffman_tree(g), g), 13.0 / 6.0, 1e-12);
    EXPECT_NEAR(average_code_length(build_huffman_tree(g), normalize(g)), 13.0 / 6.0, 1e-12);
}

TEST(Refinement, WorkedExampleCandidates) {
    const PrefixTree t = build_bary_huffman_tree(five_cells(), 3);
    const CodingTree ct = make_coding_tree(t);
    const auto cands = refinement_candidates(t, 4);  // v5, index 001000
    std::vector<std::string> got;
    for (const Pattern& p : cands) got.push_back(p.str());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::string>{"001000", "011000", "101000", "111000"}));
    const Pattern original = make_index("001000");
    EXPECT_TRUE(is_valid_refinement(ct, original, original));
    // Setting bit 0 or 1 makes the index match the "0*" or "1*" subtree
    // tokens, so no proper refinement of v5 survives in this tree.
    for (const char* bad : {"011000", "101000", "111000"}) {
        EXPECT_FALSE(is_valid_refinement(ct, original, make_index(bad))) << bad;
    }
}

TEST(Refinement, BinaryHasNoFreeBits) {
    const PrefixTree t = build_huffman_tree(five_cells());
    EXPECT_EQ(refinement_candidates(t, 2).size(), 1u);
}

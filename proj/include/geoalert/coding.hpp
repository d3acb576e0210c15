#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoalert/grid.hpp"
#include "geoalert/pattern.hpp"

namespace geoalert {

// Node of a B-ary prefix tree. children[i] is reached by appending symbol i.
struct TreeNode {
    std::vector<std::size_t> children;
    std::optional<std::size_t> parent;
    double weight = 0.0;
    std::string code;         // over {0..B-1}; empty at the root
    std::optional<int> cell_id;  // leaves only; unset on B-ary completion dummies
    int depth = 0;

    bool is_leaf() const noexcept { return children.empty(); }
    bool is_dummy() const noexcept { return is_leaf() && !cell_id; }
};

// Immutable prefix tree over cells. Nodes live in one vector; leaves created
// by the builders come first, internal nodes follow in creation (merge) order.
class PrefixTree {
public:
    PrefixTree(std::vector<TreeNode> nodes, std::size_t root, int arity);

    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t root() const noexcept { return root_; }
    int arity() const noexcept { return arity_; }
    // Depth of the deepest leaf in symbols (1 for a single-leaf tree).
    int reference_length() const noexcept { return reference_length_; }
    // Leaves left to right, dummies included.
    const std::vector<std::size_t>& leaf_order() const noexcept { return leaf_order_; }
    std::size_t cell_count() const noexcept { return cell_leaf_.size(); }
    std::size_t leaf_of(int cell_id) const { return cell_leaf_.at(static_cast<std::size_t>(cell_id)); }
    // Internal nodes in the order they were created.
    std::vector<std::size_t> internal_nodes() const;

    // Code used for indexes and codewords: the leaf code, or "0" for the lone
    // leaf of a single-cell tree.
    std::string effective_code(std::size_t node) const;

private:
    friend PrefixTree derive_node_codes(PrefixTree tree);

    std::vector<TreeNode> nodes_;
    std::size_t root_;
    int arity_;
    int reference_length_ = 1;
    std::vector<std::size_t> leaf_order_;
    std::vector<std::size_t> cell_leaf_;
};

// Largest supported arity; symbols render as 0-9 then a-z.
inline constexpr int kMaxArity = 36;
char symbol_char(int symbol);
int symbol_value(char c);  // -1 if not a symbol character

// Binary Huffman: repeatedly merge the two lightest nodes; ties go to the node
// holding the smallest cell id and the first-extracted node becomes child 0.
PrefixTree build_huffman_tree(const ProbabilityGrid& grid);

// Complete binary tree over the weights sorted ascending, paired left to right.
PrefixTree build_balanced_tree(const ProbabilityGrid& grid);

// B-ary Huffman with zero-weight completion dummies. B = 2 is build_huffman_tree.
// Throws ParameterError unless 2 <= B <= min(max(n, 2), kMaxArity).
PrefixTree build_bary_huffman_tree(const ProbabilityGrid& grid, int arity);

// Root code "", child i gets parent code + symbol i. Builders already call it.
PrefixTree derive_node_codes(PrefixTree tree);

class CellIndexMap {
public:
    explicit CellIndexMap(std::vector<Pattern> index_by_cell);

    std::size_t size() const noexcept { return by_cell_.size(); }
    std::size_t width() const noexcept { return width_; }
    const Pattern& index_of(int cell_id) const { return by_cell_.at(static_cast<std::size_t>(cell_id)); }
    std::optional<int> cell_of(const Pattern& index) const;
    const std::vector<Pattern>& indexes() const noexcept { return by_cell_; }

private:
    std::vector<Pattern> by_cell_;
    std::unordered_map<std::string, int> by_index_;
    std::size_t width_ = 0;
};

enum class ExpansionContext { Codeword, Index };

// Maps each symbol i to B bits with bit i set and '*' elsewhere, '*' to B
// stars and padding positions to B zeros. In index context the remaining
// stars become '0'. Empty `padding` means no padded positions.
Pattern expand_bary(std::string_view symbols, int arity, const std::vector<bool>& padding,
                    ExpansionContext context);

// Leaf codes right-padded with '0' to RL (then expanded when B > 2).
CellIndexMap make_cell_indexes(const PrefixTree& tree);

struct CodingLeaf {
    std::string codeword;  // symbol level, '*'-padded to RL
    int cell_id = 0;
    Pattern index;
};

// Prefix tree annotated with '*'-padded codewords and descendant leaf counts.
// Codewords are kept at symbol level; expanded() gives the HVE bit pattern.
class CodingTree {
public:
    explicit CodingTree(const PrefixTree& tree);

    int arity() const noexcept { return arity_; }
    int symbol_width() const noexcept { return symbol_width_; }
    // Width of indexes and tokens in bits.
    std::size_t bit_width() const noexcept;

    // Codeword -> number of (non-dummy) leaves below, for every internal node and the root.
    const std::map<std::string, std::size_t>& parent_leaf_counts() const noexcept { return parent_leaf_counts_; }
    std::optional<std::size_t> leaf_count(const std::string& codeword) const;
    const std::vector<CodingLeaf>& leaf_order() const noexcept { return leaves_; }
    // Every node's codeword, root first, depth-first.
    const std::vector<std::string>& codewords() const noexcept { return codewords_; }

    Pattern expanded(const std::string& codeword) const;
    // Position in leaf_order() of the leaf with this unpadded code, if any.
    std::optional<std::size_t> position_of_code(const std::string& code) const;
    // Symbol string of an index: identity for B = 2; for B > 2 each B-bit
    // chunk decodes to its set bit, an all-zero chunk to '0'. Empty on a malformed chunk.
    std::optional<std::string> index_symbols(const Pattern& index) const;

private:
    int arity_;
    int symbol_width_;
    std::map<std::string, std::size_t> parent_leaf_counts_;
    std::vector<CodingLeaf> leaves_;
    std::vector<std::string> codewords_;
    std::unordered_map<std::string, std::size_t> position_by_code_;
};

CodingTree make_coding_tree(const PrefixTree& tree);

// Fixed-length baseline: cell i gets the ceil(log2 n)-bit binary of i
// (width 1 when n = 1). The tree is the binary trie of those codes.
std::pair<PrefixTree, CellIndexMap> build_fixed_length(const ProbabilityGrid& grid);

// Probability-weighted mean leaf code length in symbols (weights normalized here).
double average_code_length(const PrefixTree& tree, const ProbabilityGrid& grid);

// Granularity refinement of an expanded B-ary index: every assignment of the
// bits that were stars before the index-context zeroing. Includes the original.
std::vector<Pattern> refinement_candidates(const PrefixTree& tree, int cell_id);

// A refined index is usable only if every codeword of the coding tree matches
// it exactly when it matches the cell's original index.
bool is_valid_refinement(const CodingTree& coding, const Pattern& original, const Pattern& refined);

}  // namespace geoalert

#include "geoalert/coding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <queue>

#include <fmt/format.h>

#include "geoalert/errors.hpp"

namespace geoalert {

char symbol_char(int symbol) {
    if (symbol < 0 || symbol >= kMaxArity) {
        throw ParameterError(fmt::format("symbol {} outside the supported alphabet", symbol));
    }
    return static_cast<char>(symbol < 10 ? '0' + symbol : 'a' + (symbol - 10));
}

int symbol_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

PrefixTree::PrefixTree(std::vector<TreeNode> nodes, std::size_t root, int arity)
    : nodes_(std::move(nodes)), root_(root), arity_(arity) {
    if (nodes_.empty() || root_ >= nodes_.size()) {
        throw DimensionError("prefix tree has no root");
    }
    if (arity_ < 2 || arity_ > kMaxArity) {
        throw ParameterError(fmt::format("arity {} outside [2, {}]", arity_, kMaxArity));
    }

    std::size_t cells = 0;
    for (const TreeNode& n : nodes_) {
        if (n.cell_id) ++cells;
    }
    cell_leaf_.assign(cells, nodes_.size());

    // Iterative DFS: sets parents/depths and collects leaves left to right.
    int max_depth = 0;
    std::vector<std::size_t> stack{root_};
    nodes_[root_].parent.reset();
    nodes_[root_].depth = 0;
    std::size_t visited = 0;
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        ++visited;
        TreeNode& n = nodes_[id];
        if (n.children.size() > static_cast<std::size_t>(arity_)) {
            throw ParameterError("node has more children than the arity");
        }
        if (n.is_leaf()) {
            leaf_order_.push_back(id);
            max_depth = std::max(max_depth, n.depth);
            if (n.cell_id) {
                const auto c = static_cast<std::size_t>(*n.cell_id);
                if (c >= cells || cell_leaf_[c] != nodes_.size()) {
                    throw ParameterError("cell ids on leaves must be unique and contiguous");
                }
                cell_leaf_[c] = id;
            }
            continue;
        }
        if (n.cell_id) {
            throw ParameterError("internal node carries a cell id");
        }
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
            TreeNode& child = nodes_.at(*it);
            child.parent = id;
            child.depth = n.depth + 1;
            stack.push_back(*it);
        }
    }
    if (visited != nodes_.size()) {
        throw ParameterError("prefix tree nodes are not a single tree");
    }
    if (cells == 0) {
        throw DimensionError("prefix tree has no cells");
    }
    reference_length_ = std::max(1, max_depth);
}

std::vector<std::size_t> PrefixTree::internal_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!nodes_[i].is_leaf()) out.push_back(i);
    }
    return out;
}

std::string PrefixTree::effective_code(std::size_t node) const {
    const TreeNode& n = nodes_.at(node);
    if (n.code.empty() && n.is_leaf() && node == root_) return "0";
    return n.code;
}

PrefixTree derive_node_codes(PrefixTree tree) {
    std::vector<std::size_t> stack{tree.root_};
    tree.nodes_[tree.root_].code.clear();
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        const TreeNode& n = tree.nodes_[id];
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            tree.nodes_[n.children[i]].code = n.code + symbol_char(static_cast<int>(i));
            stack.push_back(n.children[i]);
        }
    }
    return tree;
}

namespace {

std::vector<TreeNode> make_leaves(const ProbabilityGrid& grid) {
    std::vector<TreeNode> nodes(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        nodes[i].weight = grid.weights()[i];
        nodes[i].cell_id = static_cast<int>(i);
    }
    return nodes;
}

struct QueueEntry {
    double weight;
    long long key;  // smallest contained cell id; dummies are negative
    std::size_t node;
};

struct HeavierFirst {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.key > b.key;
    }
};

using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, HeavierFirst>;

PrefixTree huffman(const ProbabilityGrid& grid, int arity) {
    std::vector<TreeNode> nodes = make_leaves(grid);
    const std::size_t n = nodes.size();

    std::size_t dummies = 0;
    if (n > 1 && arity > 2) {
        const std::size_t rem = (n - 1) % static_cast<std::size_t>(arity - 1);
        dummies = rem == 0 ? 0 : static_cast<std::size_t>(arity - 1) - rem;
    }

    MinQueue queue;
    for (std::size_t i = 0; i < n; ++i) {
        queue.push({nodes[i].weight, static_cast<long long>(i), i});
    }
    for (std::size_t d = 0; d < dummies; ++d) {
        nodes.push_back(TreeNode{});
        queue.push({0.0, -static_cast<long long>(d) - 1, nodes.size() - 1});
    }

    while (queue.size() > 1) {
        std::vector<QueueEntry> group;
        for (int k = 0; k < arity && !queue.empty(); ++k) {
            group.push_back(queue.top());
            queue.pop();
        }
        if (arity > 2) {
            // Merged subtrees take the low symbols, leaves follow; extraction order otherwise.
            std::stable_partition(group.begin(), group.end(),
                                  [&](const QueueEntry& e) { return !nodes[e.node].is_leaf(); });
        }
        TreeNode parent;
        long long key = group.front().key;
        for (const QueueEntry& e : group) {
            parent.children.push_back(e.node);
            parent.weight += e.weight;
            key = std::min(key, e.key);
        }
        nodes.push_back(std::move(parent));
        queue.push({nodes.back().weight, key, nodes.size() - 1});
    }
    const std::size_t root = queue.top().node;
    return derive_node_codes(PrefixTree(std::move(nodes), root, arity));
}

}  // namespace

PrefixTree build_huffman_tree(const ProbabilityGrid& grid) { return huffman(grid, 2); }

PrefixTree build_bary_huffman_tree(const ProbabilityGrid& grid, int arity) {
    const std::size_t n = grid.size();
    const std::size_t cap = std::min<std::size_t>(std::max<std::size_t>(n, 2), kMaxArity);
    if (arity < 2 || static_cast<std::size_t>(arity) > cap) {
        throw ParameterError(fmt::format("arity {} outside [2, {}] for n = {}", arity, cap, n));
    }
    return huffman(grid, arity);
}

PrefixTree build_balanced_tree(const ProbabilityGrid& grid) {
    std::vector<TreeNode> nodes = make_leaves(grid);
    std::vector<std::size_t> queue(nodes.size());
    for (std::size_t i = 0; i < queue.size(); ++i) queue[i] = i;
    std::stable_sort(queue.begin(), queue.end(),
                     [&](std::size_t a, std::size_t b) { return nodes[a].weight < nodes[b].weight; });

    auto merge = [&](std::size_t a, std::size_t b) {
        TreeNode parent;
        parent.children = {a, b};
        parent.weight = nodes[a].weight + nodes[b].weight;
        nodes.push_back(std::move(parent));
        return nodes.size() - 1;
    };

    // First step pairs only the surplus above a power of two, so the result is
    // a complete tree of depth ceil(log2 n) with the lightest cells deepest.
    std::size_t pairs = queue.size() - std::bit_floor(queue.size());
    if (pairs == 0) pairs = queue.size() / 2;
    while (queue.size() > 1) {
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < pairs; ++i) {
            next.push_back(merge(queue[2 * i], queue[2 * i + 1]));
        }
        next.insert(next.end(), queue.begin() + static_cast<std::ptrdiff_t>(2 * pairs), queue.end());
        queue = std::move(next);
        pairs = queue.size() / 2;
    }
    return derive_node_codes(PrefixTree(std::move(nodes), queue.front(), 2));
}

CellIndexMap::CellIndexMap(std::vector<Pattern> index_by_cell) : by_cell_(std::move(index_by_cell)) {
    if (by_cell_.empty()) {
        throw DimensionError("index map is empty");
    }
    width_ = by_cell_.front().width();
    for (std::size_t i = 0; i < by_cell_.size(); ++i) {
        const Pattern& p = by_cell_[i];
        if (p.width() != width_) {
            throw ParameterError("cell indexes must all have the same width");
        }
        if (p.has_stars()) {
            throw ParameterError("cell index contains a wildcard");
        }
        if (!by_index_.emplace(p.str(), static_cast<int>(i)).second) {
            throw ParameterError("two cells share index " + p.str());
        }
    }
}

std::optional<int> CellIndexMap::cell_of(const Pattern& index) const {
    const auto it = by_index_.find(index.str());
    if (it == by_index_.end()) return std::nullopt;
    return it->second;
}

Pattern expand_bary(std::string_view symbols, int arity, const std::vector<bool>& padding,
                    ExpansionContext context) {
    if (arity < 2 || arity > kMaxArity) {
        throw ParameterError(fmt::format("arity {} outside [2, {}]", arity, kMaxArity));
    }
    if (!padding.empty() && padding.size() != symbols.size()) {
        throw ParameterError("padding mask length differs from the symbol string");
    }
    const char fill = context == ExpansionContext::Index ? '0' : kStar;
    std::string out;
    out.reserve(symbols.size() * static_cast<std::size_t>(arity));
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const char c = symbols[i];
        if (!padding.empty() && padding[i]) {
            out.append(static_cast<std::size_t>(arity), '0');
            continue;
        }
        if (c == kStar) {
            out.append(static_cast<std::size_t>(arity), kStar);
            continue;
        }
        const int v = symbol_value(c);
        if (v < 0 || v >= arity) {
            throw ParameterError(fmt::format("character '{}' is not a base-{} symbol", c, arity));
        }
        for (int bit = 0; bit < arity; ++bit) {
            out.push_back(bit == v ? '1' : fill);
        }
    }
    return Pattern(std::move(out));
}

namespace {

Pattern leaf_index(const PrefixTree& tree, std::size_t leaf) {
    std::string code = tree.effective_code(leaf);
    const auto rl = static_cast<std::size_t>(tree.reference_length());
    const std::size_t used = code.size();
    code.resize(rl, '0');
    if (tree.arity() == 2) {
        return Pattern(std::move(code));
    }
    std::vector<bool> padding(rl, false);
    std::fill(padding.begin() + static_cast<std::ptrdiff_t>(used), padding.end(), true);
    return expand_bary(code, tree.arity(), padding, ExpansionContext::Index);
}

bool matches(const Pattern& token, const Pattern& index) {
    for (std::size_t i = 0; i < token.width(); ++i) {
        if (token[i] != kStar && token[i] != index[i]) return false;
    }
    return true;
}

}  // namespace

CellIndexMap make_cell_indexes(const PrefixTree& tree) {
    std::vector<Pattern> indexes(tree.cell_count());
    for (std::size_t c = 0; c < indexes.size(); ++c) {
        indexes[c] = leaf_index(tree, tree.leaf_of(static_cast<int>(c)));
    }
    return CellIndexMap(std::move(indexes));
}

CodingTree::CodingTree(const PrefixTree& tree)
    : arity_(tree.arity()), symbol_width_(tree.reference_length()) {
    const auto nodes = tree.nodes();
    const auto rl = static_cast<std::size_t>(symbol_width_);
    auto padded = [&](std::size_t id) {
        std::string c = tree.effective_code(id);
        c.resize(rl, kStar);
        return c;
    };

    // Real-leaf counts, children before parents.
    std::vector<std::size_t> counts(nodes.size(), 0);
    std::vector<std::size_t> order;
    std::vector<std::size_t> stack{tree.root()};
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        order.push_back(id);
        for (auto it = nodes[id].children.rbegin(); it != nodes[id].children.rend(); ++it) {
            stack.push_back(*it);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TreeNode& n = nodes[*it];
        if (n.is_leaf()) {
            counts[*it] = n.cell_id ? 1 : 0;
        } else {
            for (std::size_t c : n.children) counts[*it] += counts[c];
        }
    }

    for (std::size_t id : order) {
        if (nodes[id].is_dummy()) continue;
        codewords_.push_back(padded(id));
        if (!nodes[id].is_leaf() || id == tree.root()) {
            parent_leaf_counts_.emplace(codewords_.back(), counts[id]);
        }
    }
    for (std::size_t id : tree.leaf_order()) {
        if (nodes[id].is_dummy()) continue;
        position_by_code_.emplace(tree.effective_code(id), leaves_.size());
        leaves_.push_back(CodingLeaf{padded(id), *nodes[id].cell_id, leaf_index(tree, id)});
    }
}

std::size_t CodingTree::bit_width() const noexcept {
    const auto w = static_cast<std::size_t>(symbol_width_);
    return arity_ == 2 ? w : w * static_cast<std::size_t>(arity_);
}

std::optional<std::size_t> CodingTree::leaf_count(const std::string& codeword) const {
    const auto it = parent_leaf_counts_.find(codeword);
    if (it == parent_leaf_counts_.end()) return std::nullopt;
    return it->second;
}

Pattern CodingTree::expanded(const std::string& codeword) const {
    if (arity_ == 2) return Pattern(codeword);
    return expand_bary(codeword, arity_, {}, ExpansionContext::Codeword);
}

std::optional<std::size_t> CodingTree::position_of_code(const std::string& code) const {
    const auto it = position_by_code_.find(code);
    if (it == position_by_code_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> CodingTree::index_symbols(const Pattern& index) const {
    if (arity_ == 2) return index.str();
    const auto b = static_cast<std::size_t>(arity_);
    if (index.width() % b != 0) return std::nullopt;
    std::string out;
    for (std::size_t chunk = 0; chunk < index.width(); chunk += b) {
        int set = -1;
        for (std::size_t bit = 0; bit < b; ++bit) {
            const char c = index[chunk + bit];
            if (c == '1') {
                if (set >= 0) return std::nullopt;
                set = static_cast<int>(bit);
            } else if (c != '0') {
                return std::nullopt;
            }
        }
        out.push_back(symbol_char(set < 0 ? 0 : set));
    }
    return out;
}

CodingTree make_coding_tree(const PrefixTree& tree) { return CodingTree(tree); }

std::pair<PrefixTree, CellIndexMap> build_fixed_length(const ProbabilityGrid& grid) {
    const std::size_t n = grid.size();
    const int width = n <= 1 ? 1 : static_cast<int>(std::bit_width(n - 1));

    std::vector<TreeNode> nodes = make_leaves(grid);
    nodes.push_back(TreeNode{});
    const std::size_t root_id = nodes.size() - 1;

    std::vector<Pattern> indexes;
    indexes.reserve(n);
    for (std::size_t cell = 0; cell < n; ++cell) {
        std::string bits(static_cast<std::size_t>(width), '0');
        for (int b = 0; b < width; ++b) {
            if ((cell >> (width - 1 - b)) & 1U) bits[static_cast<std::size_t>(b)] = '1';
        }
        std::size_t at = root_id;
        for (int b = 0; b < width; ++b) {
            nodes[at].weight += grid.weights()[cell];
            const auto sym = static_cast<std::size_t>(bits[static_cast<std::size_t>(b)] - '0');
            if (b == width - 1) {
                // Codes arrive in increasing order, so symbol 1 never precedes symbol 0.
                nodes[at].children.resize(sym + 1, cell);
                nodes[at].children[sym] = cell;
                break;
            }
            if (nodes[at].children.size() <= sym) {
                nodes.push_back(TreeNode{});
                nodes[at].children.push_back(nodes.size() - 1);
            }
            at = nodes[at].children[sym];
        }
        indexes.emplace_back(std::move(bits));
    }
    PrefixTree tree = derive_node_codes(PrefixTree(std::move(nodes), root_id, 2));
    return {std::move(tree), CellIndexMap(std::move(indexes))};
}

double average_code_length(const PrefixTree& tree, const ProbabilityGrid& grid) {
    if (grid.size() != tree.cell_count()) {
        throw DimensionError("grid and tree cover different cell counts");
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const std::size_t leaf = tree.leaf_of(static_cast<int>(c));
        acc += grid.weights()[c] * static_cast<double>(tree.effective_code(leaf).size());
    }
    return acc / grid.total_weight();
}

std::vector<Pattern> refinement_candidates(const PrefixTree& tree, int cell_id) {
    const std::size_t leaf = tree.leaf_of(cell_id);
    const Pattern base = leaf_index(tree, leaf);
    if (tree.arity() == 2) return {base};

    // Star positions before zeroing: non-set bits of expanded code symbols.
    const std::string code = tree.effective_code(leaf);
    const auto b = static_cast<std::size_t>(tree.arity());
    std::vector<std::size_t> free_bits;
    for (std::size_t s = 0; s < code.size(); ++s) {
        const auto v = static_cast<std::size_t>(symbol_value(code[s]));
        for (std::size_t bit = 0; bit < b; ++bit) {
            if (bit != v) free_bits.push_back(s * b + bit);
        }
    }
    if (free_bits.size() > 20) {
        throw ParameterError("too many refinement bits to enumerate");
    }
    std::vector<Pattern> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << free_bits.size()); ++mask) {
        std::string s = base.str();
        for (std::size_t k = 0; k < free_bits.size(); ++k) {
            if ((mask >> k) & 1U) s[free_bits[k]] = '1';
        }
        out.emplace_back(std::move(s));
    }
    return out;
}

bool is_valid_refinement(const CodingTree& coding, const Pattern& original, const Pattern& refined) {
    if (original.width() != coding.bit_width() || refined.width() != coding.bit_width()) {
        throw ParameterError("refined index width differs from the coding tree width");
    }
    for (const std::string& cw : coding.codewords()) {
        const Pattern token = coding.expanded(cw);
        if (matches(token, original) != matches(token, refined)) return false;
    }
    return true;
}

}  // namespace geoalert

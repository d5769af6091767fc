#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kripke {

using NodeIndex = std::size_t;
// Subsets of the nodes of a frame, bit i standing for node index i.
using NodeSet = std::uint64_t;

inline constexpr std::size_t max_frame_nodes = 64;

inline constexpr NodeSet node_bit(NodeIndex v) { return NodeSet{1} << v; }
inline constexpr bool contains(NodeSet set, NodeIndex v) { return (set >> v) & 1U; }
inline int node_count(NodeSet set) { return std::popcount(set); }
std::vector<NodeIndex> members_of(NodeSet set);

// A finite rooted tree order. Nodes carry integer ids for I/O and are
// addressed internally by their position in nodes().
class Frame {
public:
    [[nodiscard]] std::size_t size() const { return ids_.size(); }
    [[nodiscard]] const std::vector<int>& ids() const { return ids_; }
    [[nodiscard]] int id(NodeIndex v) const { return ids_.at(v); }
    [[nodiscard]] NodeIndex index_of(int id) const;
    [[nodiscard]] NodeIndex root() const { return root_; }
    [[nodiscard]] NodeSet all() const { return size() == 64 ? ~NodeSet{0} : node_bit(size()) - 1; }

    [[nodiscard]] bool le(NodeIndex a, NodeIndex b) const { return contains(cone_[a], b); }
    // K^{>=v}
    [[nodiscard]] NodeSet cone(NodeIndex v) const { return cone_[v]; }
    // K^{<=v}
    [[nodiscard]] NodeSet past(NodeIndex v) const { return past_[v]; }
    // Cone of v in preorder, v first; every sub-cone is a contiguous range.
    [[nodiscard]] const std::vector<NodeIndex>& cone_preorder(NodeIndex v) const { return preorder_[v]; }
    [[nodiscard]] const std::vector<NodeIndex>& children(NodeIndex v) const { return children_[v]; }
    [[nodiscard]] std::optional<NodeIndex> parent(NodeIndex v) const { return parent_[v]; }
    // For w strictly above v: the child of v on the path to w.
    [[nodiscard]] NodeIndex step_towards(NodeIndex v, NodeIndex w) const;
    [[nodiscard]] bool is_end(NodeIndex v) const { return children_[v].empty(); }
    // E_K
    [[nodiscard]] NodeSet end_nodes() const { return ends_; }
    // E_v
    [[nodiscard]] NodeSet ends_above(NodeIndex v) const { return cone_[v] & ends_; }
    // Longest chain, counted in nodes.
    [[nodiscard]] int depth() const;
    // Nodes ordered so that every node comes after all nodes above it.
    [[nodiscard]] std::vector<NodeIndex> top_down_order() const;

    // Order pairs (a, b) with a <= b, by id.
    [[nodiscard]] std::vector<std::pair<int, int>> order_pairs() const;

    friend Frame validate_tree(const std::vector<int>& nodes, const std::vector<std::pair<int, int>>& le,
                               std::optional<int> root);

private:
    std::vector<int> ids_;
    std::vector<NodeSet> cone_;
    std::vector<NodeSet> past_;
    std::vector<std::vector<NodeIndex>> children_;
    std::vector<std::vector<NodeIndex>> preorder_;
    std::vector<std::optional<NodeIndex>> parent_;
    NodeSet ends_ = 0;
    NodeIndex root_ = 0;
};

// Closes `le` reflexively and transitively and checks the tree axioms. Throws
// FrameError naming the violated condition.
Frame validate_tree(const std::vector<int>& nodes, const std::vector<std::pair<int, int>>& le,
                    std::optional<int> root = std::nullopt);

// Builds a frame from a parent array (parent[0] is ignored; node 0 is the root).
Frame frame_from_parents(const std::vector<int>& parent);
Frame chain(std::size_t length);
// Root with `branches` end-nodes above it.
Frame star(std::size_t branches);

bool is_upset(const Frame& frame, NodeSet set);
// Upsets of K^{>=v}, in ascending bitmask order.
std::vector<NodeSet> upsets(const Frame& frame, NodeIndex v);
// The minimal elements of an upset.
std::vector<NodeIndex> minimal_nodes(const Frame& frame, NodeSet upset);

struct NodeSignature {
    std::size_t upset_count; // U_v
    NodeSet ends;            // E_v
    friend bool operator==(const NodeSignature&, const NodeSignature&) = default;
};

NodeSignature node_signature(const Frame& frame, NodeIndex v);
bool signature_injective(const Frame& frame);

// AHU encoding of the rooted unordered tree; isomorphic trees share it.
std::string canonical_code(const Frame& frame);
// Inverse of canonical_code up to node ids; nodes are numbered in preorder.
Frame frame_from_code(const std::string& code);

// All rooted trees with 1..max_nodes nodes up to isomorphism, by size.
std::vector<Frame> enumerate_trees(std::size_t max_nodes);

struct FrameClass {
    enum class Kind { all, linear, splitting, depth };
    Kind kind = Kind::all;
    int n = 0;

    static FrameClass all_trees() { return {Kind::all, 0}; }
    static FrameClass linear() { return {Kind::linear, 0}; }
    // Every non-end node has exactly n immediate successors.
    static FrameClass splitting(int n) { return {Kind::splitting, n}; }
    // Trees of depth at most n.
    static FrameClass depth_at_most(int n) { return {Kind::depth, n}; }

    [[nodiscard]] std::string name() const;
    [[nodiscard]] bool contains(const Frame& frame) const;
};

FrameClass parse_frame_class(const std::string& text);

// Frames of the class up to the bound. The bound counts nodes, except for
// splitting classes where it bounds the depth.
std::vector<Frame> enumerate_class(const FrameClass& cls, std::size_t bound);

} // namespace kripke

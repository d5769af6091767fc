#include "kripke/frames.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace kripke {

std::vector<NodeIndex> members_of(NodeSet set)
{
    std::vector<NodeIndex> out;
    while (set != 0) {
        out.push_back(static_cast<NodeIndex>(std::countr_zero(set)));
        set &= set - 1;
    }
    return out;
}

NodeIndex Frame::index_of(int id) const
{
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) {
        throw FrameError("unknown node " + std::to_string(id));
    }
    return static_cast<NodeIndex>(it - ids_.begin());
}

NodeIndex Frame::step_towards(NodeIndex v, NodeIndex w) const
{
    for (NodeIndex c : children_[v]) {
        if (contains(cone_[c], w)) {
            return c;
        }
    }
    throw FrameError("node " + std::to_string(id(w)) + " is not strictly above " + std::to_string(id(v)));
}

int Frame::depth() const
{
    int best = 0;
    for (NodeIndex v = 0; v < size(); ++v) {
        best = std::max(best, node_count(past_[v]));
    }
    return best;
}

std::vector<NodeIndex> Frame::top_down_order() const
{
    std::vector<NodeIndex> order(size());
    for (NodeIndex v = 0; v < size(); ++v) {
        order[v] = v;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return node_count(past_[a]) > node_count(past_[b]); });
    return order;
}

std::vector<std::pair<int, int>> Frame::order_pairs() const
{
    std::vector<std::pair<int, int>> out;
    for (NodeIndex a = 0; a < size(); ++a) {
        for (NodeIndex b : members_of(cone_[a])) {
            out.emplace_back(ids_[a], ids_[b]);
        }
    }
    return out;
}

Frame validate_tree(const std::vector<int>& nodes, const std::vector<std::pair<int, int>>& le, std::optional<int> root)
{
    if (nodes.empty()) {
        throw FrameError("frame has no nodes");
    }
    if (nodes.size() > max_frame_nodes) {
        throw FrameError("frame has more than " + std::to_string(max_frame_nodes) + " nodes");
    }
    Frame f;
    f.ids_ = nodes;
    {
        std::set<int> seen(nodes.begin(), nodes.end());
        if (seen.size() != nodes.size()) {
            throw FrameError("duplicate node id");
        }
    }
    const std::size_t n = nodes.size();
    f.cone_.assign(n, 0);
    for (NodeIndex v = 0; v < n; ++v) {
        f.cone_[v] = node_bit(v);
    }
    for (const auto& [a, b] : le) {
        f.cone_[f.index_of(a)] |= node_bit(f.index_of(b));
    }
    // Warshall over bitsets.
    for (NodeIndex k = 0; k < n; ++k) {
        for (NodeIndex i = 0; i < n; ++i) {
            if (contains(f.cone_[i], k)) {
                f.cone_[i] |= f.cone_[k];
            }
        }
    }
    f.past_.assign(n, 0);
    for (NodeIndex a = 0; a < n; ++a) {
        for (NodeIndex b : members_of(f.cone_[a])) {
            f.past_[b] |= node_bit(a);
        }
    }
    for (NodeIndex a = 0; a < n; ++a) {
        for (NodeIndex b : members_of(f.cone_[a] & f.past_[a])) {
            if (b != a) {
                throw FrameError("not a partial order: nodes " + std::to_string(nodes[a]) + " and "
                                 + std::to_string(nodes[b]) + " lie on a cycle");
            }
        }
    }
    for (NodeIndex v = 0; v < n; ++v) {
        for (NodeIndex a : members_of(f.past_[v])) {
            for (NodeIndex b : members_of(f.past_[v])) {
                if (!contains(f.cone_[a], b) && !contains(f.cone_[b], a)) {
                    throw FrameError("non-linear past: nodes " + std::to_string(nodes[a]) + " and "
                                     + std::to_string(nodes[b]) + " below " + std::to_string(nodes[v])
                                     + " are incomparable");
                }
            }
        }
    }
    std::optional<NodeIndex> found_root;
    for (NodeIndex v = 0; v < n; ++v) {
        if (f.cone_[v] == f.all()) {
            found_root = v;
        }
    }
    if (!found_root) {
        throw FrameError("no root: no node lies below every other node");
    }
    if (root && f.index_of(*root) != *found_root) {
        throw FrameError("declared root " + std::to_string(*root) + " is not below every node");
    }
    f.root_ = *found_root;

    f.children_.assign(n, {});
    f.parent_.assign(n, std::nullopt);
    for (NodeIndex w = 0; w < n; ++w) {
        const NodeSet strictly_below = f.past_[w] & ~node_bit(w);
        if (strictly_below == 0) {
            continue;
        }
        // The parent is the largest strict predecessor; pasts are chains.
        NodeIndex parent = f.root_;
        for (NodeIndex a : members_of(strictly_below)) {
            if (node_count(f.past_[a]) > node_count(f.past_[parent])) {
                parent = a;
            }
        }
        f.parent_[w] = parent;
        f.children_[parent].push_back(w);
    }
    for (NodeIndex v = 0; v < n; ++v) {
        if (f.children_[v].empty()) {
            f.ends_ |= node_bit(v);
        }
    }
    f.preorder_.assign(n, {});
    std::function<void(NodeIndex, std::vector<NodeIndex>&)> walk = [&](NodeIndex v, std::vector<NodeIndex>& out) {
        out.push_back(v);
        for (NodeIndex c : f.children_[v]) {
            walk(c, out);
        }
    };
    for (NodeIndex v = 0; v < n; ++v) {
        walk(v, f.preorder_[v]);
    }
    return f;
}

Frame frame_from_parents(const std::vector<int>& parent)
{
    std::vector<int> nodes;
    std::vector<std::pair<int, int>> le;
    for (std::size_t i = 0; i < parent.size(); ++i) {
        nodes.push_back(static_cast<int>(i));
        if (i > 0) {
            le.emplace_back(parent[i], static_cast<int>(i));
        }
    }
    return validate_tree(nodes, le, 0);
}

Frame chain(std::size_t length)
{
    std::vector<int> parent(length);
    for (std::size_t i = 1; i < length; ++i) {
        parent[i] = static_cast<int>(i - 1);
    }
    return frame_from_parents(parent);
}

Frame star(std::size_t branches)
{
    return frame_from_parents(std::vector<int>(branches + 1, 0));
}

bool is_upset(const Frame& frame, NodeSet set)
{
    if ((set & ~frame.all()) != 0) {
        return false;
    }
    for (NodeIndex v : members_of(set)) {
        if ((frame.cone(v) & ~set) != 0) {
            return false;
        }
    }
    return true;
}

namespace {

std::vector<NodeSet> cone_upsets(const Frame& frame, NodeIndex v)
{
    // An upset of K^{>=v} either contains v (then it is the whole cone) or is
    // a union of upsets of the children's cones.
    std::vector<NodeSet> combined{0};
    for (NodeIndex c : frame.children(v)) {
        const auto sub = cone_upsets(frame, c);
        std::vector<NodeSet> next;
        next.reserve(combined.size() * sub.size());
        for (NodeSet a : combined) {
            for (NodeSet b : sub) {
                next.push_back(a | b);
            }
        }
        combined = std::move(next);
    }
    combined.push_back(frame.cone(v));
    return combined;
}

} // namespace

std::vector<NodeSet> upsets(const Frame& frame, NodeIndex v)
{
    if (v >= frame.size()) {
        throw FrameError("unknown node index " + std::to_string(v));
    }
    auto out = cone_upsets(frame, v);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeIndex> minimal_nodes(const Frame& frame, NodeSet upset)
{
    std::vector<NodeIndex> out;
    for (NodeIndex v : members_of(upset)) {
        if ((frame.past(v) & upset) == node_bit(v)) {
            out.push_back(v);
        }
    }
    return out;
}

NodeSignature node_signature(const Frame& frame, NodeIndex v)
{
    return {upsets(frame, v).size(), frame.ends_above(v)};
}

bool signature_injective(const Frame& frame)
{
    std::vector<NodeSignature> seen;
    for (NodeIndex v = 0; v < frame.size(); ++v) {
        auto sig = node_signature(frame, v);
        if (std::find(seen.begin(), seen.end(), sig) != seen.end()) {
            return false;
        }
        seen.push_back(sig);
    }
    return true;
}

namespace {

std::string code_at(const Frame& frame, NodeIndex v)
{
    std::vector<std::string> parts;
    for (NodeIndex c : frame.children(v)) {
        parts.push_back(code_at(frame, c));
    }
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (const auto& p : parts) {
        out += p;
    }
    return out + ")";
}

} // namespace

// Frame whose nodes are numbered in preorder of the code.
Frame frame_from_code(const std::string& code)
{
    std::vector<int> parent;
    std::vector<int> stack;
    for (std::size_t i = 0; i < code.size(); ++i) {
        const char c = code[i];
        if (c == '(' && (i == 0 || !stack.empty())) {
            parent.push_back(stack.empty() ? 0 : stack.back());
            stack.push_back(static_cast<int>(parent.size() - 1));
        } else if (c == ')' && !stack.empty()) {
            stack.pop_back();
        } else {
            throw ParseError("malformed tree code '" + code + "'", i);
        }
    }
    if (parent.empty() || !stack.empty()) {
        throw ParseError("malformed tree code '" + code + "'", code.size());
    }
    return frame_from_parents(parent);
}

namespace {

std::vector<std::vector<std::string>> tree_codes_by_size(std::size_t max_nodes)
{
    std::vector<std::vector<std::string>> by_size(max_nodes + 1);
    if (max_nodes >= 1) {
        by_size[1].push_back("()");
    }
    for (std::size_t s = 2; s <= max_nodes; ++s) {
        // Multisets of subtrees with total size s-1, chosen in non-increasing
        // (size, index) order so each multiset is produced once.
        std::vector<std::string> chosen;
        std::function<void(std::size_t, std::size_t, std::size_t)> pick = [&](std::size_t remaining,
                                                                              std::size_t max_size,
                                                                              std::size_t max_index) {
            if (remaining == 0) {
                auto parts = chosen;
                std::sort(parts.begin(), parts.end());
                std::string code = "(";
                for (const auto& p : parts) {
                    code += p;
                }
                by_size[s].push_back(code + ")");
                return;
            }
            for (std::size_t size = std::min(remaining, max_size); size >= 1; --size) {
                const std::size_t limit = size == max_size ? max_index : by_size[size].size() - 1;
                for (std::size_t idx = 0; idx <= limit && idx < by_size[size].size(); ++idx) {
                    chosen.push_back(by_size[size][idx]);
                    pick(remaining - size, size, idx);
                    chosen.pop_back();
                }
            }
        };
        pick(s - 1, s - 1, by_size[s - 1].size() - 1);
    }
    return by_size;
}

} // namespace

std::string canonical_code(const Frame& frame) { return code_at(frame, frame.root()); }

std::vector<Frame> enumerate_trees(std::size_t max_nodes)
{
    std::vector<Frame> out;
    const auto by_size = tree_codes_by_size(max_nodes);
    for (std::size_t s = 1; s <= max_nodes; ++s) {
        for (const auto& code : by_size[s]) {
            out.push_back(frame_from_code(code));
        }
    }
    return out;
}

std::string FrameClass::name() const
{
    switch (kind) {
    case Kind::all:
        return "all";
    case Kind::linear:
        return "linear";
    case Kind::splitting:
        return "splitting:" + std::to_string(n);
    case Kind::depth:
        return "depth:" + std::to_string(n);
    }
    return "?";
}

bool FrameClass::contains(const Frame& frame) const
{
    switch (kind) {
    case Kind::all:
        return true;
    case Kind::linear:
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if (frame.children(v).size() > 1) {
                return false;
            }
        }
        return true;
    case Kind::splitting:
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if (!frame.is_end(v) && frame.children(v).size() != static_cast<std::size_t>(n)) {
                return false;
            }
        }
        return true;
    case Kind::depth:
        return frame.depth() <= n;
    }
    return false;
}

FrameClass parse_frame_class(const std::string& text)
{
    std::string head = text;
    int n = 0;
    if (auto pos = text.find_first_of(":("); pos != std::string::npos) {
        head = text.substr(0, pos);
        std::string arg = text.substr(pos + 1);
        if (!arg.empty() && arg.back() == ')') {
            arg.pop_back();
        }
        try {
            n = std::stoi(arg);
        } catch (const std::exception&) {
            throw PreconditionError("bad frame class parameter in '" + text + "'");
        }
        if (n < 1) {
            throw PreconditionError("frame class parameter must be positive in '" + text + "'");
        }
    }
    if (head == "all" || head == "trees") {
        return FrameClass::all_trees();
    }
    if (head == "linear") {
        return FrameClass::linear();
    }
    if (head == "splitting" && n > 0) {
        return FrameClass::splitting(n);
    }
    if (head == "depth" && n > 0) {
        return FrameClass::depth_at_most(n);
    }
    throw PreconditionError("unknown frame class '" + text + "' (expected all, linear, splitting:N, depth:N)");
}

std::vector<Frame> enumerate_class(const FrameClass& cls, std::size_t bound)
{
    std::vector<Frame> out;
    switch (cls.kind) {
    case FrameClass::Kind::all:
        return enumerate_trees(bound);
    case FrameClass::Kind::linear:
        for (std::size_t len = 1; len <= bound; ++len) {
            out.push_back(chain(len));
        }
        return out;
    case FrameClass::Kind::depth:
        for (auto& f : enumerate_trees(bound)) {
            if (f.depth() <= cls.n) {
                out.push_back(std::move(f));
            }
        }
        return out;
    case FrameClass::Kind::splitting: {
        // Shapes of depth <= d: a point, or a root over a multiset of n shapes of depth <= d-1.
        std::vector<std::string> shapes{"()"};
        std::vector<std::string> by_depth_order{"()"};
        for (std::size_t d = 2; d <= bound; ++d) {
            std::set<std::string> next(shapes.begin(), shapes.end());
            std::vector<std::size_t> pick(static_cast<std::size_t>(cls.n), 0);
            // Non-decreasing index tuples enumerate multisets.
            std::function<void(std::size_t, std::size_t)> go = [&](std::size_t pos, std::size_t from) {
                if (pos == pick.size()) {
                    std::vector<std::string> parts;
                    for (auto i : pick) {
                        parts.push_back(shapes[i]);
                    }
                    std::sort(parts.begin(), parts.end());
                    std::string code = "(";
                    for (const auto& p : parts) {
                        code += p;
                    }
                    code += ")";
                    if (next.insert(code).second) {
                        by_depth_order.push_back(code);
                    }
                    return;
                }
                for (std::size_t i = from; i < shapes.size(); ++i) {
                    pick[pos] = i;
                    go(pos + 1, i);
                }
            };
            go(0, 0);
            shapes = by_depth_order;
        }
        if (bound == 0) {
            return out;
        }
        for (const auto& code : by_depth_order) {
            out.push_back(frame_from_code(code));
        }
        std::stable_sort(out.begin(), out.end(), [](const Frame& a, const Frame& b) { return a.size() < b.size(); });
        return out;
    }
    }
    return out;
}

} // namespace kripke

#include "kripke/blended.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace kripke {

std::uint64_t default_blend_budget()
{
    if (const char* env = std::getenv("KRIPKE_BLEND_BUDGET")) {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return value;
        }
    }
    return builtin_blend_budget;
}

const Universe& BlendedModel::universe(NodeIndex e) const
{
    auto it = universes_.find(e);
    if (it == universes_.end()) {
        throw PreconditionError("node " + std::to_string(frame_.id(e)) + " is not an end-node");
    }
    return it->second;
}

ElementId BlendedModel::intern(NodeIndex v, std::vector<ElementId> members, std::vector<ElementId> kids, int rank)
{
    Key key{v, std::move(members), std::move(kids)};
    if (auto it = index_.find(key); it != index_.end()) {
        return it->second;
    }
    const auto id = static_cast<ElementId>(elements_.size());
    elements_.push_back({v, std::get<1>(key), std::get<2>(key), rank, false});
    index_.emplace(std::move(key), id);
    by_rank_[v].push_back(id);
    return id;
}

std::optional<ElementId> BlendedModel::lookup(const Key& key) const
{
    if (auto it = index_.find(key); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::size_t BlendedModel::child_position(NodeIndex v, NodeIndex w) const
{
    if (v >= frame_.size() || w >= frame_.size() || v == w || !frame_.le(v, w)) {
        throw PreconditionError("node " + std::to_string(frame_.id(w)) + " is not strictly above "
                                + std::to_string(frame_.id(v)));
    }
    return child_pos_[v][w];
}

BlendedModel BlendedModel::construct(const Frame& frame, const std::map<NodeIndex, Universe>& universes,
                                     int rank_cutoff, std::uint64_t budget)
{
    if (rank_cutoff < 1) {
        throw PreconditionError("rank cutoff must be at least 1");
    }
    for (NodeIndex e : members_of(frame.end_nodes())) {
        if (!universes.contains(e)) {
            throw PreconditionError("no universe assigned to end-node " + std::to_string(frame.id(e)));
        }
    }
    for (const auto& [v, u] : universes) {
        if (v >= frame.size() || !frame.is_end(v)) {
            throw PreconditionError("universe assigned to a node that is not an end-node");
        }
    }

    BlendedModel m;
    m.frame_ = frame;
    m.cutoff_ = rank_cutoff;
    m.universes_ = universes;
    const std::size_t n = frame.size();
    const auto R = static_cast<std::size_t>(rank_cutoff);
    m.by_rank_.assign(n, {});
    m.stratum_size_.assign(n, std::vector<std::size_t>(R + 1, 0));
    m.fresh_.assign(n, {});
    m.child_pos_.assign(n, std::vector<std::size_t>(n, 0));
    for (NodeIndex v = 0; v < n; ++v) {
        const auto& kids = frame.children(v);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            for (NodeIndex w : members_of(frame.cone(kids[i]))) {
                m.child_pos_[v][w] = i;
            }
        }
    }

    for (const auto& [e, u] : universes) {
        auto& table = m.embedded_[e];
        for (SetId a = 0; a < u.size(); ++a) {
            std::vector<ElementId> members;
            for (SetId b : u.members(a)) {
                members.push_back(table[b]);
            }
            std::sort(members.begin(), members.end());
            table.push_back(m.intern(e, std::move(members), {}, u.rank(a) + 1));
        }
        for (std::size_t alpha = 0; alpha <= R; ++alpha) {
            m.stratum_size_[e][alpha] = u.count_below_rank(static_cast<int>(alpha));
        }
    }

    const auto order = frame.top_down_order();
    for (std::size_t alpha = 1; alpha <= R; ++alpha) {
        for (NodeIndex v : order) {
            if (frame.is_end(v)) {
                continue;
            }
            // Copied: interning below appends to the same node's list.
            const auto prev_span = m.stratum(v, static_cast<int>(alpha - 1));
            const std::vector<ElementId> prev(prev_span.begin(), prev_span.end());
            const auto& kids = frame.children(v);
            std::vector<std::span<const ElementId>> choices;
            for (NodeIndex c : kids) {
                choices.push_back(m.stratum(c, static_cast<int>(alpha)));
            }

            // 2^|D_v^{alpha-1}| * prod |D_c^alpha| candidate (S, z) pairs.
            const std::uint64_t too_many = std::numeric_limits<std::uint64_t>::max();
            std::uint64_t estimate = prev.size() >= 63 ? too_many : std::uint64_t{1} << prev.size();
            for (const auto& ch : choices) {
                if (estimate != too_many && ch.size() > 0 && estimate > too_many / ch.size()) {
                    estimate = too_many;
                } else if (estimate != too_many) {
                    estimate *= ch.size();
                }
            }
            if (estimate > budget) {
                throw BudgetExceeded("stratum at node " + std::to_string(frame.id(v)) + ", rank "
                                     + std::to_string(alpha) + ": estimated "
                                     + (estimate == too_many ? std::string("more than 2^64")
                                                             : std::to_string(estimate))
                                     + " candidates, budget " + std::to_string(budget));
            }

            // allowed[i][k]: the y in D_v^{alpha-1} whose restriction to child i
            // is a member of the k-th choice z_i.
            std::vector<std::vector<std::uint64_t>> allowed(kids.size());
            for (std::size_t i = 0; i < kids.size(); ++i) {
                for (ElementId z : choices[i]) {
                    std::uint64_t mask = 0;
                    for (std::size_t j = 0; j < prev.size(); ++j) {
                        if (m.has_member(z, m.restrict(prev[j], kids[i]))) {
                            mask |= std::uint64_t{1} << j;
                        }
                    }
                    allowed[i].push_back(mask);
                }
            }
            const std::uint64_t full = prev.empty() ? 0 : (prev.size() == 64 ? ~std::uint64_t{0}
                                                                                : (std::uint64_t{1} << prev.size()) - 1);
            std::vector<std::size_t> pick(kids.size(), 0);
            bool done = std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); });
            while (!done) {
                std::uint64_t mask = full;
                std::vector<ElementId> z(kids.size());
                for (std::size_t i = 0; i < kids.size(); ++i) {
                    mask &= allowed[i][pick[i]];
                    z[i] = choices[i][pick[i]];
                }
                // Every subset S of the allowed y.
                std::uint64_t sub = mask;
                for (;;) {
                    std::vector<ElementId> members;
                    for (std::uint64_t bits = sub; bits != 0; bits &= bits - 1) {
                        members.push_back(prev[static_cast<std::size_t>(std::countr_zero(bits))]);
                    }
                    std::sort(members.begin(), members.end());
                    m.intern(v, std::move(members), z, static_cast<int>(alpha));
                    if (sub == 0) {
                        break;
                    }
                    sub = (sub - 1) & mask;
                }
                std::size_t i = 0;
                while (i < kids.size() && ++pick[i] == choices[i].size()) {
                    pick[i] = 0;
                    ++i;
                }
                done = i == kids.size();
            }
            m.stratum_size_[v][alpha] = m.by_rank_[v].size();
        }
    }

    for (NodeIndex u = 0; u < n; ++u) {
        const auto dom = m.domain(u);
        if (auto p = frame.parent(u)) {
            std::vector<ElementId> from_parent;
            for (ElementId x : m.domain(*p)) {
                from_parent.push_back(m.restrict(x, u));
            }
            std::sort(from_parent.begin(), from_parent.end());
            for (ElementId x : dom) {
                if (!std::binary_search(from_parent.begin(), from_parent.end(), x)) {
                    m.fresh_[u].push_back(x);
                }
            }
        } else {
            m.fresh_[u].assign(dom.begin(), dom.end());
        }
        for (ElementId x : m.fresh_[u]) {
            m.elements_[x].fresh = true;
        }
    }
    return m;
}

bool BlendedModel::has_member(ElementId x, ElementId y) const
{
    const auto& list = elements_[x].members;
    return std::binary_search(list.begin(), list.end(), y);
}

const std::vector<ElementId>& BlendedModel::value_at(ElementId x, NodeIndex w) const
{
    return elements_[restrict(x, w)].members;
}

ElementId BlendedModel::restrict(ElementId x, NodeIndex w) const
{
    while (elements_[x].node != w) {
        const NodeIndex v = elements_[x].node;
        x = elements_[x].kids[child_position(v, w)];
    }
    return x;
}

std::span<const ElementId> BlendedModel::stratum(NodeIndex v, int alpha) const
{
    if (alpha < 0 || alpha > cutoff_) {
        throw PreconditionError("stratum rank " + std::to_string(alpha) + " outside 0.." + std::to_string(cutoff_));
    }
    const auto& all = by_rank_.at(v);
    return {all.data(), stratum_size_[v][static_cast<std::size_t>(alpha)]};
}

std::span<const ElementId> BlendedModel::domain(NodeIndex v) const
{
    if (frame_.is_end(v)) {
        const auto& all = embedded_.at(v);
        return {all.data(), all.size()};
    }
    return stratum(v, cutoff_);
}

ElementId BlendedModel::embed(NodeIndex e, SetId a) const
{
    const auto& table = embedded_.at(e);
    if (a >= table.size()) {
        throw PreconditionError("set " + std::to_string(a) + " is outside the end universe");
    }
    return table[a];
}

SetId BlendedModel::project(ElementId x) const
{
    const NodeIndex e = node_of(x);
    auto it = embedded_.find(e);
    if (it == embedded_.end()) {
        throw PreconditionError("element is not based at an end-node");
    }
    const auto pos = std::lower_bound(it->second.begin(), it->second.end(), x);
    return static_cast<SetId>(pos - it->second.begin());
}

SpecClass BlendedModel::classify(NodeIndex v, const ElementSpec& spec) const
{
    SpecClass out;
    const NodeSet cone = frame_.cone(v);
    for (const auto& [w, values] : spec) {
        if (w >= frame_.size() || !contains(cone, w)) {
            out.reason = "value given outside the cone of the base node";
            return out;
        }
        for (ElementId y : values) {
            if (y >= elements_.size() || elements_[y].node != w) {
                out.reason = "member at node " + std::to_string(frame_.id(w)) + " is not based there";
                return out;
            }
        }
    }
    std::map<NodeIndex, std::vector<ElementId>> sorted;
    for (NodeIndex w : members_of(cone)) {
        auto it = spec.find(w);
        if (it == spec.end()) {
            out.reason = "no value at node " + std::to_string(frame_.id(w));
            return out;
        }
        auto list = it->second;
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        sorted[w] = std::move(list);
    }
    for (NodeIndex w : members_of(cone)) {
        for (NodeIndex c : frame_.children(w)) {
            for (ElementId y : sorted[w]) {
                if (!std::binary_search(sorted[c].begin(), sorted[c].end(), restrict(y, c))) {
                    out.reason = "a member at node " + std::to_string(frame_.id(w))
                                 + " does not restrict into the value at node " + std::to_string(frame_.id(c));
                    return out;
                }
            }
        }
    }

    std::map<NodeIndex, ElementId> built;
    for (NodeIndex w : frame_.top_down_order()) {
        if (!contains(cone, w)) {
            continue;
        }
        int r = 1;
        for (ElementId y : sorted[w]) {
            r = std::max(r, elements_[y].rank + 1);
        }
        std::vector<ElementId> kids;
        for (NodeIndex c : frame_.children(w)) {
            kids.push_back(built[c]);
            r = std::max(r, elements_[built[c]].rank);
        }
        if (frame_.is_end(w)) {
            std::vector<SetId> sets;
            for (ElementId y : sorted[w]) {
                sets.push_back(project(y));
            }
            std::sort(sets.begin(), sets.end());
            if (!universe(w).find(sets)) {
                out.kind = SpecClass::Kind::rank_too_high;
                out.rank = r;
                out.reason = "end universe at node " + std::to_string(frame_.id(w)) + " lacks the set";
                return out;
            }
        } else if (r > cutoff_) {
            out.kind = SpecClass::Kind::rank_too_high;
            out.rank = r;
            out.reason = "rank " + std::to_string(r) + " at node " + std::to_string(frame_.id(w))
                         + " exceeds the cutoff " + std::to_string(cutoff_);
            return out;
        }
        auto found = lookup(Key{w, sorted[w], kids});
        if (!found) {
            throw InternalCheckFailure("valid element of rank " + std::to_string(r) + " missing from the domain at node "
                                       + std::to_string(frame_.id(w)));
        }
        built[w] = *found;
    }
    out.kind = SpecClass::Kind::in_domain;
    out.element = built[v];
    out.rank = elements_[out.element].rank;
    return out;
}

ElementId BlendedModel::element_of(NodeIndex v, const ElementSpec& spec) const
{
    auto cls = classify(v, spec);
    if (cls.kind != SpecClass::Kind::in_domain) {
        throw PreconditionError("not an element of the domain: " + cls.reason);
    }
    return cls.element;
}

ElementSpec BlendedModel::spec_of(ElementId x) const
{
    ElementSpec spec;
    for (NodeIndex w : members_of(frame_.cone(node_of(x)))) {
        spec[w] = value_at(x, w);
    }
    return spec;
}

ElementId BlendedModel::zero(NodeIndex v) const
{
    ElementSpec spec;
    for (NodeIndex w : members_of(frame_.cone(v))) {
        spec[w] = {};
    }
    return element_of(v, spec);
}

ElementId BlendedModel::numeral(NodeIndex v, int n) const
{
    if (n < 0 || n >= cutoff_) {
        throw PreconditionError("numeral " + std::to_string(n) + " needs rank cutoff above it");
    }
    ElementSpec spec;
    for (NodeIndex w : members_of(frame_.cone(v))) {
        auto& list = spec[w];
        for (int i = 0; i < n; ++i) {
            list.push_back(numeral(w, i));
        }
    }
    return element_of(v, spec);
}

std::string BlendedModel::show(ElementId x) const
{
    const auto& d = elements_[x];
    if (frame_.is_end(d.node)) {
        return universe(d.node).show(project(x));
    }
    std::string out = "{";
    for (std::size_t i = 0; i < d.members.size(); ++i) {
        out += (i ? "," : "") + show(d.members[i]);
    }
    out += "}<";
    for (std::size_t i = 0; i < d.kids.size(); ++i) {
        out += (i ? "," : "") + show(d.kids[i]);
    }
    return out + ">";
}

std::vector<std::string> BlendedModel::validate() const
{
    std::vector<std::string> problems;
    auto report = [&](ElementId x, const std::string& what) {
        problems.push_back("element " + std::to_string(x) + " at node " + std::to_string(frame_.id(node_of(x))) + ": "
                           + what);
    };
    for (ElementId x = 0; x < elements_.size(); ++x) {
        const auto& d = elements_[x];
        const auto& kids = frame_.children(d.node);
        if (d.kids.size() != kids.size()) {
            report(x, "wrong number of child restrictions");
            continue;
        }
        int r = 1;
        for (ElementId y : d.members) {
            if (elements_[y].node != d.node) {
                report(x, "member based elsewhere");
            }
            r = std::max(r, elements_[y].rank + 1);
        }
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (elements_[d.kids[i]].node != kids[i]) {
                report(x, "child restriction based elsewhere");
                continue;
            }
            r = std::max(r, elements_[d.kids[i]].rank);
            // Condition (iii) along the edge; longer paths follow by composition.
            for (ElementId y : d.members) {
                if (!has_member(d.kids[i], restrict(y, kids[i]))) {
                    report(x, "condition (iii) fails towards node " + std::to_string(frame_.id(kids[i])));
                }
            }
        }
        if (r != d.rank) {
            report(x, "stored rank " + std::to_string(d.rank) + " but computed " + std::to_string(r));
        }
        if (frame_.is_end(d.node)) {
            std::vector<SetId> sets;
            for (ElementId y : d.members) {
                sets.push_back(project(y));
            }
            std::sort(sets.begin(), sets.end());
            auto a = universe(d.node).find(sets);
            if (!a || embed(d.node, *a) != x) {
                report(x, "condition (i): no matching set in the end universe");
            }
        } else if (d.rank > cutoff_) {
            report(x, "rank above the cutoff");
        }
        for (NodeIndex w : members_of(frame_.cone(d.node))) {
            const ElementId xw = restrict(x, w);
            for (NodeIndex u : members_of(frame_.cone(w))) {
                if (restrict(xw, u) != restrict(x, u)) {
                    report(x, "restrictions do not compose");
                }
            }
        }
    }
    for (NodeIndex v = 0; v < frame_.size(); ++v) {
        const auto& list = by_rank_[v];
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (elements_[list[i - 1]].rank > elements_[list[i]].rank) {
                problems.push_back("strata at node " + std::to_string(frame_.id(v)) + " are not nested");
            }
        }
        for (int alpha = 0; alpha <= cutoff_; ++alpha) {
            for (ElementId x : stratum(v, alpha)) {
                if (elements_[x].rank > alpha) {
                    problems.push_back("stratum " + std::to_string(alpha) + " at node " + std::to_string(frame_.id(v))
                                       + " holds an element of higher rank");
                }
            }
        }
    }
    return problems;
}

} // namespace kripke

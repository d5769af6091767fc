#include "oracles.hpp"

#include <algorithm>
#include <numeric>

namespace kripke::oracle {

std::vector<NodeSet> upsets(const Frame& frame, NodeIndex v)
{
    std::vector<NodeIndex> cone;
    for (NodeIndex w = 0; w < frame.size(); ++w) {
        if (frame.le(v, w)) {
            cone.push_back(w);
        }
    }
    std::vector<NodeSet> out;
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << cone.size()); ++pick) {
        NodeSet s = 0;
        for (std::size_t i = 0; i < cone.size(); ++i) {
            if ((pick >> i) & 1U) {
                s |= NodeSet{1} << cone[i];
            }
        }
        bool closed = true;
        for (NodeIndex a : cone) {
            for (NodeIndex b : cone) {
                if (((s >> a) & 1U) && frame.le(a, b) && !((s >> b) & 1U)) {
                    closed = false;
                }
            }
        }
        if (closed) {
            out.push_back(s);
        }
    }
    return out;
}

namespace {

bool isomorphic(const std::vector<int>& p, const std::vector<int>& q)
{
    const std::size_t n = p.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        // perm maps nodes of p to nodes of q; roots are node 0 in both.
        if (perm[0] != 0) {
            continue;
        }
        bool same = true;
        for (std::size_t i = 1; i < n && same; ++i) {
            same = perm[static_cast<std::size_t>(p[i])] == q[static_cast<std::size_t>(perm[i])];
        }
        if (same) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

void parent_arrays(std::vector<int>& current, std::size_t n, std::vector<std::vector<int>>& out)
{
    if (current.size() == n) {
        out.push_back(current);
        return;
    }
    for (int parent = 0; parent < static_cast<int>(current.size()); ++parent) {
        current.push_back(parent);
        parent_arrays(current, n, out);
        current.pop_back();
    }
}

} // namespace

std::size_t tree_count(std::size_t n)
{
    if (n == 0) {
        return 0;
    }
    std::vector<int> start{-1};
    std::vector<std::vector<int>> all;
    parent_arrays(start, n, all);
    std::vector<std::vector<int>> kept;
    for (const auto& p : all) {
        if (std::none_of(kept.begin(), kept.end(), [&](const auto& q) { return isomorphic(p, q); })) {
            kept.push_back(p);
        }
    }
    return kept.size();
}

bool force_prop(const Frame& frame, const Valuation& valuation, NodeIndex v, const PropFormula& f)
{
    using K = PropFormula::Kind;
    switch (f.kind()) {
    case K::letter:
        return (valuation.at(f.name()) >> v) & 1U;
    case K::bottom:
        return false;
    case K::conj:
        return oracle::force_prop(frame, valuation, v, f.lhs()) && oracle::force_prop(frame, valuation, v, f.rhs());
    case K::disj:
        return oracle::force_prop(frame, valuation, v, f.lhs()) || oracle::force_prop(frame, valuation, v, f.rhs());
    case K::imp:
        for (NodeIndex w = 0; w < frame.size(); ++w) {
            if (frame.le(v, w) && oracle::force_prop(frame, valuation, w, f.lhs()) && !oracle::force_prop(frame, valuation, w, f.rhs())) {
                return false;
            }
        }
        return true;
    }
    return false;
}

bool valid_in_frame(const Frame& frame, const PropFormula& f)
{
    const auto names = letters(f);
    const std::vector<std::string> order(names.begin(), names.end());
    const auto ups = oracle::upsets(frame, frame.root());
    std::vector<std::size_t> digit(order.size(), 0);
    while (true) {
        Valuation val;
        for (std::size_t i = 0; i < order.size(); ++i) {
            val[order[i]] = ups[digit[i]];
        }
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if (!oracle::force_prop(frame, val, v, f)) {
                return false;
            }
        }
        std::size_t i = 0;
        while (i < digit.size() && ++digit[i] == ups.size()) {
            digit[i++] = 0;
        }
        if (i == digit.size()) {
            return true;
        }
    }
}

bool eval_classical(const Universe& universe, const SetFormula& f, const ClassicalEnv& env)
{
    using K = SetFormula::Kind;
    switch (f.kind()) {
    case K::member: {
        const auto& ms = universe.members(env.at(f.right_var()));
        return std::find(ms.begin(), ms.end(), env.at(f.left_var())) != ms.end();
    }
    case K::equal:
        return env.at(f.left_var()) == env.at(f.right_var());
    case K::bottom:
        return false;
    case K::conj:
        return oracle::eval_classical(universe, f.lhs(), env) && oracle::eval_classical(universe, f.rhs(), env);
    case K::disj:
        return oracle::eval_classical(universe, f.lhs(), env) || oracle::eval_classical(universe, f.rhs(), env);
    case K::imp:
        return !oracle::eval_classical(universe, f.lhs(), env) || oracle::eval_classical(universe, f.rhs(), env);
    case K::exists:
    case K::forall: {
        const bool universal = f.kind() == K::forall;
        ClassicalEnv inner = env;
        for (SetId a = 0; a < universe.size(); ++a) {
            inner[f.var()] = a;
            if (oracle::eval_classical(universe, f.body(), inner) != universal) {
                return !universal;
            }
        }
        return universal;
    }
    }
    return false;
}

namespace {

Assignment moved(const BlendedModel& model, const Assignment& env, NodeIndex w)
{
    Assignment out;
    for (const auto& [name, x] : env) {
        out[name] = model.restrict(x, w);
    }
    return out;
}

} // namespace

bool force_set(const BlendedModel& model, NodeIndex v, const SetFormula& f, const Assignment& env)
{
    using K = SetFormula::Kind;
    const Frame& frame = model.frame();
    switch (f.kind()) {
    case K::member: {
        const auto& ms = model.value_at(env.at(f.right_var()), v);
        return std::find(ms.begin(), ms.end(), env.at(f.left_var())) != ms.end();
    }
    case K::equal:
        return env.at(f.left_var()) == env.at(f.right_var());
    case K::bottom:
        return false;
    case K::conj:
        return oracle::force_set(model, v, f.lhs(), env) && oracle::force_set(model, v, f.rhs(), env);
    case K::disj:
        return oracle::force_set(model, v, f.lhs(), env) || oracle::force_set(model, v, f.rhs(), env);
    case K::imp:
        for (NodeIndex w = 0; w < frame.size(); ++w) {
            if (!frame.le(v, w)) {
                continue;
            }
            const Assignment e = moved(model, env, w);
            if (oracle::force_set(model, w, f.lhs(), e) && !oracle::force_set(model, w, f.rhs(), e)) {
                return false;
            }
        }
        return true;
    case K::exists: {
        Assignment e = env;
        for (ElementId a : model.domain(v)) {
            e[f.var()] = a;
            if (oracle::force_set(model, v, f.body(), e)) {
                return true;
            }
        }
        return false;
    }
    case K::forall:
        for (NodeIndex w = 0; w < frame.size(); ++w) {
            if (!frame.le(v, w)) {
                continue;
            }
            Assignment e = moved(model, env, w);
            for (ElementId a : model.domain(w)) {
                e[f.var()] = a;
                if (!oracle::force_set(model, w, f.body(), e)) {
                    return false;
                }
            }
        }
        return true;
    }
    return false;
}

NodeSet truth_set(const BlendedModel& model, const SetFormula& sentence)
{
    NodeSet out = 0;
    for (NodeIndex v = 0; v < model.frame().size(); ++v) {
        if (oracle::force_set(model, v, sentence)) {
            out |= NodeSet{1} << v;
        }
    }
    return out;
}

} // namespace kripke::oracle

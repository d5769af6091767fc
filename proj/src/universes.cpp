#include "kripke/universes.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <functional>

namespace kripke {

namespace {

// Ackermann order on member lists sorted ascending: compare from the largest
// member down.
bool ackermann_less(const std::vector<SetId>& a, const std::vector<SetId>& b)
{
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

} // namespace

Universe Universe::from_member_lists(const std::vector<std::vector<std::size_t>>& members)
{
    const std::size_t n = members.size();
    for (const auto& list : members) {
        for (std::size_t m : list) {
            if (m >= n) {
                throw PreconditionError("member index " + std::to_string(m) + " outside the carrier");
            }
        }
    }
    // Ranks by depth-first search; a back edge means a membership cycle.
    std::vector<int> rank(n, -1);
    std::vector<char> on_stack(n, 0);
    std::function<int(std::size_t)> visit = [&](std::size_t a) -> int {
        if (rank[a] >= 0) {
            return rank[a];
        }
        if (on_stack[a]) {
            throw PreconditionError("membership is not well-founded");
        }
        on_stack[a] = 1;
        int r = 0;
        for (std::size_t m : members[a]) {
            r = std::max(r, visit(m) + 1);
        }
        on_stack[a] = 0;
        return rank[a] = r;
    };
    int height = 0;
    for (std::size_t a = 0; a < n; ++a) {
        height = std::max(height, visit(a) + 1);
    }

    std::vector<std::size_t> order(n);
    for (std::size_t a = 0; a < n; ++a) {
        order[a] = a;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });

    Universe u;
    u.height_ = n == 0 ? 0 : height;
    std::vector<SetId> new_id(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos;
        while (end < n && rank[order[end]] == rank[order[pos]]) {
            ++end;
        }
        // Members of this rank level already carry their final ids.
        std::vector<std::pair<std::vector<SetId>, std::size_t>> level;
        for (std::size_t i = pos; i < end; ++i) {
            std::vector<SetId> list;
            for (std::size_t m : members[order[i]]) {
                list.push_back(new_id[m]);
            }
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            level.emplace_back(std::move(list), order[i]);
        }
        std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) { return ackermann_less(a.first, b.first); });
        for (auto& [list, old] : level) {
            const auto id = static_cast<SetId>(u.members_.size());
            if (!u.index_.emplace(list, id).second) {
                throw PreconditionError("carrier is not extensional: two entries have the same members");
            }
            new_id[old] = id;
            u.members_.push_back(std::move(list));
            u.rank_.push_back(rank[old]);
        }
        pos = end;
    }
    return u;
}

bool Universe::is_member(SetId a, SetId b) const
{
    const auto& list = members_.at(b);
    return std::binary_search(list.begin(), list.end(), a);
}

std::optional<SetId> Universe::find(const std::vector<SetId>& sorted_members) const
{
    auto it = index_.find(sorted_members);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Universe::count_below_rank(int alpha) const
{
    return static_cast<std::size_t>(std::lower_bound(rank_.begin(), rank_.end(), alpha) - rank_.begin());
}

std::string Universe::show(SetId a) const
{
    std::string out = "{";
    bool first = true;
    for (SetId m : members_.at(a)) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += show(m);
    }
    return out + "}";
}

Universe build_vk(int k, std::size_t budget)
{
    if (k < 0 || k > 5) {
        throw PreconditionError("V_k is only available for 0 <= k <= 5");
    }
    std::size_t size = 0;
    for (int i = 0; i < k; ++i) {
        size = std::size_t{1} << size;
    }
    if (size > budget) {
        throw BudgetExceeded("V_" + std::to_string(k) + " has " + std::to_string(size)
                             + " elements, universe budget is " + std::to_string(budget));
    }
    // Element c has the members {i : bit i of c}.
    std::vector<std::vector<std::size_t>> members(size);
    for (std::size_t c = 0; c < size; ++c) {
        for (std::size_t i = 0; i < 64 && (c >> i) != 0; ++i) {
            if ((c >> i) & 1U) {
                members[c].push_back(i);
            }
        }
    }
    return Universe::from_member_lists(members);
}

namespace {

class ClassicalEval {
public:
    ClassicalEval(const Universe& u, const ClassicalEnv& env) : u_(u)
    {
        for (const auto& [name, value] : env) {
            if (value >= u.size()) {
                throw PreconditionError("assignment of " + name + " is outside the carrier");
            }
            scope_.emplace_back(name, value);
        }
    }

    bool eval(const SetFormula& f)
    {
        using K = SetFormula::Kind;
        switch (f.kind()) {
        case K::member:
            return u_.is_member(lookup(f.left_var()), lookup(f.right_var()));
        case K::equal:
            return lookup(f.left_var()) == lookup(f.right_var());
        case K::bottom:
            return false;
        case K::conj:
            return eval(f.lhs()) && eval(f.rhs());
        case K::disj:
            return eval(f.lhs()) || eval(f.rhs());
        case K::imp:
            return !eval(f.lhs()) || eval(f.rhs());
        case K::exists:
        case K::forall: {
            const bool universal = f.kind() == K::forall;
            const SetFormula body = f.body();
            // forall x (x in a -> B) and exists x (x in a & B) iterate a.
            const auto guard_kind = universal ? K::imp : K::conj;
            if (body.kind() == guard_kind && body.lhs().kind() == K::member && body.lhs().left_var() == f.var()
                && body.lhs().right_var() != f.var()) {
                const SetFormula rest = body.rhs();
                for (SetId m : u_.members(lookup(body.lhs().right_var()))) {
                    if (bind(f.var(), m, rest) != universal) {
                        return !universal;
                    }
                }
                return universal;
            }
            for (SetId a = 0; a < u_.size(); ++a) {
                if (bind(f.var(), a, body) != universal) {
                    return !universal;
                }
            }
            return universal;
        }
        }
        return false;
    }

private:
    bool bind(const std::string& var, SetId value, const SetFormula& body)
    {
        scope_.emplace_back(var, value);
        const bool out = eval(body);
        scope_.pop_back();
        return out;
    }

    SetId lookup(const std::string& var) const
    {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if (it->first == var) {
                return it->second;
            }
        }
        throw UnboundError("unbound variable " + var);
    }

    const Universe& u_;
    std::vector<std::pair<std::string, SetId>> scope_;
};

} // namespace

bool eval_classical(const Universe& universe, const SetFormula& formula, const ClassicalEnv& env)
{
    return ClassicalEval(universe, env).eval(formula);
}

} // namespace kripke

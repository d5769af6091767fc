#include "kripke/propositional.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <limits>
#include <thread>

namespace kripke {

void check_valuation(const Frame& frame, const Valuation& valuation)
{
    for (const auto& [letter, set] : valuation) {
        if (!is_upset(frame, set)) {
            throw FrameError("valuation of " + letter + " is not an upset");
        }
    }
}

namespace {

NodeSet value_of(const Valuation& valuation, const std::string& letter)
{
    auto it = valuation.find(letter);
    if (it == valuation.end()) {
        throw UnboundError("valuation does not cover letter " + letter);
    }
    return it->second;
}

} // namespace

bool force_prop(const Frame& frame, const Valuation& valuation, NodeIndex v, const PropFormula& formula)
{
    using K = PropFormula::Kind;
    switch (formula.kind()) {
    case K::letter:
        return contains(value_of(valuation, formula.name()), v);
    case K::bottom:
        return false;
    case K::conj:
        return force_prop(frame, valuation, v, formula.lhs()) && force_prop(frame, valuation, v, formula.rhs());
    case K::disj:
        return force_prop(frame, valuation, v, formula.lhs()) || force_prop(frame, valuation, v, formula.rhs());
    case K::imp:
        for (NodeIndex w : members_of(frame.cone(v))) {
            if (force_prop(frame, valuation, w, formula.lhs()) && !force_prop(frame, valuation, w, formula.rhs())) {
                return false;
            }
        }
        return true;
    }
    return false;
}

NodeSet combine_truth_sets(const Frame& frame, PropFormula::Kind kind, NodeSet lhs, NodeSet rhs)
{
    switch (kind) {
    case PropFormula::Kind::conj:
        return lhs & rhs;
    case PropFormula::Kind::disj:
        return lhs | rhs;
    case PropFormula::Kind::imp: {
        const NodeSet bad = lhs & ~rhs;
        NodeSet out = 0;
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if ((frame.cone(v) & bad) == 0) {
                out |= node_bit(v);
            }
        }
        return out;
    }
    default:
        throw PreconditionError("combine_truth_sets needs a binary connective");
    }
}

NodeSet truth_set(const Frame& frame, const Valuation& valuation, const PropFormula& formula)
{
    switch (formula.kind()) {
    case PropFormula::Kind::letter:
        return value_of(valuation, formula.name());
    case PropFormula::Kind::bottom:
        return 0;
    default:
        return combine_truth_sets(frame, formula.kind(), truth_set(frame, valuation, formula.lhs()),
                                  truth_set(frame, valuation, formula.rhs()));
    }
}

std::uint64_t valuation_count(const Frame& frame, const PropFormula& formula)
{
    const auto base = static_cast<std::uint64_t>(upsets(frame, frame.root()).size());
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < letters(formula).size(); ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / base) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= base;
    }
    return total;
}

std::optional<Countermodel> find_countermodel(const Frame& frame, const PropFormula& formula,
                                              const ValidityOptions& options)
{
    const auto names = letters(formula);
    const std::vector<std::string> letter_list(names.begin(), names.end());
    const auto ups = upsets(frame, frame.root());
    const std::uint64_t total = valuation_count(frame, formula);
    if (total > options.valuation_budget) {
        throw BudgetExceeded("valuation sweep needs " + std::to_string(total) + " valuations, budget is "
                             + std::to_string(options.valuation_budget));
    }

    // Valuation number i: the first letter is the most significant digit.
    auto decode = [&](std::uint64_t i) {
        Valuation val;
        for (std::size_t k = letter_list.size(); k-- > 0;) {
            val[letter_list[k]] = ups[i % ups.size()];
            i /= ups.size();
        }
        return val;
    };
    auto fails = [&](std::uint64_t i) { return truth_set(frame, decode(i), formula) != frame.all(); };

    std::uint64_t found = total;
    const unsigned jobs = std::max(1U, options.jobs);
    if (jobs == 1 || total < 4096) {
        for (std::uint64_t i = 0; i < total; ++i) {
            if (fails(i)) {
                found = i;
                break;
            }
        }
    } else {
        constexpr std::uint64_t chunk = 1024;
        std::atomic<std::uint64_t> next{0};
        std::atomic<std::uint64_t> best{total};
        auto worker = [&] {
            for (;;) {
                const std::uint64_t start = next.fetch_add(chunk);
                if (start >= total || start >= best.load()) {
                    return;
                }
                const std::uint64_t stop = std::min(total, start + chunk);
                for (std::uint64_t i = start; i < stop; ++i) {
                    if (fails(i)) {
                        std::uint64_t cur = best.load();
                        while (i < cur && !best.compare_exchange_weak(cur, i)) {
                        }
                        break;
                    }
                }
            }
        };
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        pool.clear();
        found = best.load();
    }
    if (found == total) {
        return std::nullopt;
    }
    Countermodel cm;
    cm.valuation = decode(found);
    // The root fails whenever anything fails, since truth sets are upsets.
    cm.node = frame.root();
    return cm;
}

bool valid_in_frame(const Frame& frame, const PropFormula& formula, const ValidityOptions& options)
{
    return !find_countermodel(frame, formula, options).has_value();
}

std::string Logic::name() const
{
    switch (kind) {
    case Kind::ipc:
        return "IPC";
    case Kind::lc:
        return "LC";
    case Kind::t:
        return "T(" + std::to_string(n) + ")";
    case Kind::bd:
        return "BD(" + std::to_string(n) + ")";
    }
    return "?";
}

FrameClass Logic::frame_class() const
{
    switch (kind) {
    case Kind::ipc:
        return FrameClass::all_trees();
    case Kind::lc:
        return FrameClass::linear();
    case Kind::t:
        return FrameClass::splitting(n);
    case Kind::bd:
        return FrameClass::depth_at_most(n);
    }
    return FrameClass::all_trees();
}

Logic parse_logic(const std::string& text)
{
    std::string s;
    for (char c : text) {
        if (c != ' ') {
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (s == "ipc") {
        return {Logic::Kind::ipc, 0};
    }
    if (s == "lc") {
        return {Logic::Kind::lc, 0};
    }
    auto param = [&](std::size_t prefix) {
        std::string arg = s.substr(prefix);
        if (!arg.empty() && (arg.front() == ':' || arg.front() == '(')) {
            arg.erase(0, 1);
        }
        if (!arg.empty() && arg.back() == ')') {
            arg.pop_back();
        }
        if (arg.empty() || !std::all_of(arg.begin(), arg.end(), [](char c) { return std::isdigit(c) != 0; })) {
            throw PreconditionError("bad logic '" + text + "'");
        }
        const int n = std::stoi(arg);
        if (n < 1) {
            throw PreconditionError("logic parameter must be positive in '" + text + "'");
        }
        return n;
    };
    if (s.rfind("bd", 0) == 0) {
        return {Logic::Kind::bd, param(2)};
    }
    if (s.rfind("t", 0) == 0) {
        return {Logic::Kind::t, param(1)};
    }
    throw PreconditionError("unknown logic '" + text + "' (expected ipc, lc, t:N, bd:N)");
}

PropFormula lc_axiom()
{
    const auto p = PropFormula::letter("p");
    const auto q = PropFormula::letter("q");
    return PropFormula::disj(PropFormula::imp(p, q), PropFormula::imp(q, p));
}

namespace {

PropFormula disjunction_except(int n, int skip)
{
    std::optional<PropFormula> out;
    for (int j = n; j >= 0; --j) {
        if (j == skip) {
            continue;
        }
        auto letter = PropFormula::letter("p" + std::to_string(j));
        out = out ? PropFormula::disj(letter, *out) : letter;
    }
    return out ? *out : PropFormula::bottom();
}

} // namespace

PropFormula t_axiom(int n)
{
    if (n < 1) {
        throw PreconditionError("T(n) needs n >= 1");
    }
    std::optional<PropFormula> premise;
    for (int k = n; k >= 0; --k) {
        const auto rest = disjunction_except(n, k);
        const auto part = PropFormula::imp(PropFormula::imp(PropFormula::letter("p" + std::to_string(k)), rest), rest);
        premise = premise ? PropFormula::conj(part, *premise) : part;
    }
    return PropFormula::imp(*premise, disjunction_except(n, -1));
}

PropFormula bd_axiom(int n)
{
    if (n < 1) {
        throw PreconditionError("BD(n) needs n >= 1");
    }
    auto beta = PropFormula::letter("q");
    for (int i = 1; i <= n; ++i) {
        const auto p = PropFormula::letter("p" + std::to_string(i));
        beta = PropFormula::imp(PropFormula::imp(PropFormula::imp(p, beta), p), p);
    }
    return beta;
}

PropFormula axiom(const Logic& logic)
{
    switch (logic.kind) {
    case Logic::Kind::lc:
        return lc_axiom();
    case Logic::Kind::t:
        return t_axiom(logic.n);
    case Logic::Kind::bd:
        return bd_axiom(logic.n);
    case Logic::Kind::ipc:
        break;
    }
    throw PreconditionError("IPC has no axiom beyond intuitionistic logic");
}

MembershipResult logic_member(const FrameClass& cls, const PropFormula& formula, std::size_t bound,
                              const ValidityOptions& options)
{
    MembershipResult result;
    for (const auto& frame : enumerate_class(cls, bound)) {
        ++result.frames_checked;
        if (auto cm = find_countermodel(frame, formula, options)) {
            result.frame = frame;
            result.countermodel = std::move(cm);
            return result;
        }
    }
    return result;
}

} // namespace kripke

#include "kripke/blended.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <unordered_map>

namespace kripke {

namespace {

using Env = std::vector<ElementId>;

struct Prog {
    enum class Op { bot, mem, eq, conj, disj, imp, exists, forall, bforall, bexists, block, sentence };
    Op op = Op::bot;
    int a = -1; // atoms: left slot; bounded quantifiers: the bounding set
    int b = -1; // atoms: right slot
    int var = -1;
    std::vector<std::shared_ptr<const Prog>> kids;
    std::vector<int> live; // slots free in this subformula
    int max_slot = -1;
    std::size_t sentence = 0;

    // Block: forall vars (lhs -> rhs), lhs/rhs split into conjuncts/disjuncts.
    std::vector<int> vars;
    std::shared_ptr<const Prog> lhs;
    std::shared_ptr<const Prog> rhs;
    std::vector<int> conj_need; // last var position a conjunct mentions, -1 for none
    std::vector<int> disj_need;
    std::vector<bool> conj_single; // mentions exactly one block var
    std::vector<int> inner_live;
};

using ProgPtr = std::shared_ptr<const Prog>;

std::vector<int> merge_live(const std::vector<ProgPtr>& kids, const std::vector<int>& drop = {})
{
    std::vector<int> out;
    for (const auto& k : kids) {
        out.insert(out.end(), k->live.begin(), k->live.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::erase_if(out, [&](int s) { return std::find(drop.begin(), drop.end(), s) != drop.end(); });
    return out;
}

int max_slot_of(const std::vector<ProgPtr>& kids, int own)
{
    int out = own;
    for (const auto& k : kids) {
        out = std::max(out, k->max_slot);
    }
    return out;
}

// forall x (x in a -> B) / exists x (x in a & B) with a distinct from x.
bool bounded_form(const SetFormula& f)
{
    const SetFormula body = f.body();
    const auto guard = f.kind() == SetFormula::Kind::forall ? SetFormula::Kind::imp : SetFormula::Kind::conj;
    if (body.kind() != guard) {
        return false;
    }
    const SetFormula atom = body.lhs();
    return atom.kind() == SetFormula::Kind::member && atom.left_var() == f.var() && atom.right_var() != f.var();
}

void flatten(const SetFormula& f, SetFormula::Kind kind, std::vector<SetFormula>& out)
{
    if (f.kind() == kind) {
        flatten(f.lhs(), kind, out);
        flatten(f.rhs(), kind, out);
    } else {
        out.push_back(f);
    }
}

} // namespace

struct Evaluator::Impl {
    struct Sentence {
        SetFormula formula;
        ProgPtr prog;
        ProgPtr ref;
        std::optional<NodeSet> truth;
    };

    using Scope = std::vector<std::pair<std::string, int>>;

    const BlendedModel& m;
    const Frame& frame;
    Mode mode;
    std::deque<Sentence> sentences;
    std::unordered_map<const void*, std::size_t> sentence_index;
    std::map<std::pair<const void*, std::string>, std::pair<SetFormula, ProgPtr>> compiled;

    Impl(const BlendedModel& model, Mode md) : m(model), frame(model.frame()), mode(md) {}

    [[nodiscard]] bool fast() const { return mode == Mode::fast; }

    // ---- compilation

    struct Compiler {
        Impl& self;
        int next_slot = 0;

        int lookup(const Scope& scope, const std::string& name) const
        {
            for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
                if (it->first == name) {
                    return it->second;
                }
            }
            throw UnboundError("unbound variable " + name);
        }

        ProgPtr compile(const SetFormula& f, Scope& scope, bool top)
        {
            using K = SetFormula::Kind;
            if (self.fast()) {
                if (auto it = self.sentence_index.find(f.identity()); it != self.sentence_index.end()) {
                    return self.sentences[it->second].ref;
                }
            }
            auto p = std::make_shared<Prog>();
            switch (f.kind()) {
            case K::bottom:
                p->op = Prog::Op::bot;
                return p;
            case K::member:
            case K::equal:
                p->op = f.kind() == K::member ? Prog::Op::mem : Prog::Op::eq;
                p->a = lookup(scope, f.left_var());
                p->b = lookup(scope, f.right_var());
                p->live = {std::min(p->a, p->b), std::max(p->a, p->b)};
                p->live.erase(std::unique(p->live.begin(), p->live.end()), p->live.end());
                p->max_slot = std::max(p->a, p->b);
                return p;
            case K::conj:
            case K::disj: {
                p->op = f.kind() == K::conj ? Prog::Op::conj : Prog::Op::disj;
                std::vector<SetFormula> parts;
                flatten(f, f.kind(), parts);
                for (const auto& part : parts) {
                    p->kids.push_back(compile(part, scope, false));
                }
                break;
            }
            case K::imp:
                p->op = Prog::Op::imp;
                p->kids = {compile(f.lhs(), scope, false), compile(f.rhs(), scope, false)};
                break;
            case K::exists:
            case K::forall:
                compile_quantifier(f, scope, *p);
                break;
            }
            if (p->op != Prog::Op::exists && p->op != Prog::Op::forall && p->op != Prog::Op::bforall
                && p->op != Prog::Op::bexists && p->op != Prog::Op::block) {
                p->live = merge_live(p->kids);
                p->max_slot = max_slot_of(p->kids, -1);
            }
            if (self.fast() && !top && p->live.empty() && p->op != Prog::Op::bot) {
                return self.register_sentence(f, p);
            }
            return p;
        }

        void compile_quantifier(const SetFormula& f, Scope& scope, Prog& p)
        {
            using K = SetFormula::Kind;
            const bool universal = f.kind() == K::forall;
            if (self.fast() && bounded_form(f)) {
                p.op = universal ? Prog::Op::bforall : Prog::Op::bexists;
                p.a = lookup(scope, f.body().lhs().right_var());
                p.var = next_slot++;
                scope.emplace_back(f.var(), p.var);
                p.kids = {compile(f.body().rhs(), scope, false)};
                scope.pop_back();
                p.live = merge_live(p.kids, {p.var});
                if (std::find(p.live.begin(), p.live.end(), p.a) == p.live.end()) {
                    p.live.push_back(p.a);
                    std::sort(p.live.begin(), p.live.end());
                }
                p.max_slot = max_slot_of(p.kids, std::max(p.var, p.a));
                return;
            }
            if (self.fast() && universal) {
                std::vector<std::string> names{f.var()};
                SetFormula body = f.body();
                while (body.kind() == K::forall && !bounded_form(body)) {
                    names.push_back(body.var());
                    body = body.body();
                }
                if (body.kind() == K::imp) {
                    compile_block(names, body, scope, p);
                    return;
                }
            }
            p.op = universal ? Prog::Op::forall : Prog::Op::exists;
            p.var = next_slot++;
            scope.emplace_back(f.var(), p.var);
            p.kids = {compile(f.body(), scope, false)};
            scope.pop_back();
            p.live = merge_live(p.kids, {p.var});
            p.max_slot = max_slot_of(p.kids, p.var);
        }

        void compile_block(const std::vector<std::string>& names, const SetFormula& body, Scope& scope, Prog& p)
        {
            p.op = Prog::Op::block;
            for (const auto& name : names) {
                p.vars.push_back(next_slot++);
                scope.emplace_back(name, p.vars.back());
            }
            auto position = [&](const ProgPtr& q) {
                int pos = -1;
                for (int s : q->live) {
                    auto it = std::find(p.vars.begin(), p.vars.end(), s);
                    if (it != p.vars.end()) {
                        pos = std::max(pos, static_cast<int>(it - p.vars.begin()));
                    }
                }
                return pos;
            };
            std::vector<SetFormula> conjuncts;
            std::vector<SetFormula> disjuncts;
            flatten(body.lhs(), K::conj, conjuncts);
            flatten(body.rhs(), K::disj, disjuncts);
            auto lhs = std::make_shared<Prog>();
            lhs->op = Prog::Op::conj;
            for (const auto& c : conjuncts) {
                lhs->kids.push_back(compile(c, scope, false));
                p.conj_need.push_back(position(lhs->kids.back()));
                const auto& lv = lhs->kids.back()->live;
                p.conj_single.push_back(std::count_if(lv.begin(), lv.end(), [&](int s) {
                                            return std::find(p.vars.begin(), p.vars.end(), s) != p.vars.end();
                                        }) == 1);
            }
            auto rhs = std::make_shared<Prog>();
            rhs->op = Prog::Op::disj;
            for (const auto& d : disjuncts) {
                rhs->kids.push_back(compile(d, scope, false));
                p.disj_need.push_back(position(rhs->kids.back()));
            }
            scope.resize(scope.size() - names.size());
            lhs->live = merge_live(lhs->kids);
            lhs->max_slot = max_slot_of(lhs->kids, -1);
            rhs->live = merge_live(rhs->kids);
            rhs->max_slot = max_slot_of(rhs->kids, -1);
            p.lhs = lhs;
            p.rhs = rhs;
            p.inner_live = merge_live({lhs, rhs});
            p.live = merge_live({lhs, rhs}, p.vars);
            p.max_slot = std::max({lhs->max_slot, rhs->max_slot, p.vars.back()});
        }

        using K = SetFormula::Kind;
    };

    ProgPtr register_sentence(const SetFormula& f, ProgPtr prog)
    {
        auto ref = std::make_shared<Prog>();
        ref->op = Prog::Op::sentence;
        ref->sentence = sentences.size();
        sentences.push_back({f, std::move(prog), ref, std::nullopt});
        sentence_index.emplace(f.identity(), ref->sentence);
        return ref;
    }

    // ---- evaluation

    Env moved(const std::vector<int>& live, const Env& env, NodeIndex u) const
    {
        Env out = env;
        for (int s : live) {
            out[static_cast<std::size_t>(s)] = m.restrict(env[static_cast<std::size_t>(s)], u);
        }
        return out;
    }

    NodeSet sentence_truth(std::size_t index)
    {
        if (auto t = sentences[index].truth) {
            return *t;
        }
        const ProgPtr prog = sentences[index].prog;
        const NodeSet t = evaluate_everywhere(*prog);
        sentences[index].truth = t;
        return t;
    }

    NodeSet evaluate_everywhere(const Prog& prog)
    {
        NodeSet t = 0;
        Env env(static_cast<std::size_t>(prog.max_slot + 1), 0);
        for (NodeIndex v : frame.top_down_order()) {
            if (fast()) {
                // Truth sets are upsets: v can only force what all children force.
                const auto& kids = frame.children(v);
                if (std::any_of(kids.begin(), kids.end(), [&](NodeIndex c) { return !contains(t, c); })) {
                    continue;
                }
            }
            if (eval(prog, v, env)) {
                t |= node_bit(v);
            }
        }
        return t;
    }

    bool eval_imp(const Prog& lhs, const Prog& rhs, const std::vector<int>& live, NodeIndex w, Env& env)
    {
        const auto& order = frame.cone_preorder(w);
        if (!fast()) {
            for (NodeIndex u : order) {
                Env e2 = u == w ? env : moved(live, env, u);
                if (eval(lhs, u, e2) && !eval(rhs, u, e2)) {
                    return false;
                }
            }
            return true;
        }
        for (std::size_t i = 0; i < order.size();) {
            const NodeIndex u = order[i];
            Env e2 = u == w ? env : moved(live, env, u);
            if (eval(rhs, u, e2)) {
                // rhs persists through the whole sub-cone, which is contiguous.
                i += static_cast<std::size_t>(node_count(frame.cone(u)));
                continue;
            }
            if (eval(lhs, u, e2)) {
                return false;
            }
            ++i;
        }
        return true;
    }

    bool forced_somewhere(const Prog& p, NodeIndex u, const Env& env)
    {
        for (NodeIndex e : members_of(frame.ends_above(u))) {
            Env e2 = e == u ? env : moved(p.live, env, e);
            if (eval(p, e, e2)) {
                return true;
            }
        }
        return false;
    }

    // Conjuncts with a single block var, keyed by its value; the outer env is fixed per node.
    using ConjCache = std::vector<std::unordered_map<ElementId, bool>>;

    // True when every completion of the tuple bound up to `pos` satisfies lhs -> rhs at u.
    bool settled(const Prog& p, int pos, NodeIndex u, Env& env, ConjCache* cache = nullptr)
    {
        for (std::size_t i = 0; i < p.conj_need.size(); ++i) {
            if (p.conj_need[i] != pos) {
                continue;
            }
            bool somewhere = false;
            if (cache != nullptr && p.conj_single[i]) {
                const ElementId a = env[static_cast<std::size_t>(p.vars[static_cast<std::size_t>(pos)])];
                auto& slot = (*cache)[i];
                if (auto it = slot.find(a); it != slot.end()) {
                    somewhere = it->second;
                } else {
                    somewhere = forced_somewhere(*p.lhs->kids[i], u, env);
                    slot.emplace(a, somewhere);
                }
            } else {
                somewhere = forced_somewhere(*p.lhs->kids[i], u, env);
            }
            if (!somewhere) {
                return true;
            }
        }
        for (std::size_t i = 0; i < p.disj_need.size(); ++i) {
            if (p.disj_need[i] == pos && eval(*p.rhs->kids[i], u, env)) {
                return true;
            }
        }
        return false;
    }

    bool block_assign(const Prog& p, std::size_t pos, NodeIndex u, Env& env, bool have_fresh, ConjCache& cache)
    {
        if (pos == p.vars.size()) {
            return !have_fresh || eval_imp(*p.lhs, *p.rhs, p.inner_live, u, env);
        }
        const auto slot = static_cast<std::size_t>(p.vars[pos]);
        for (ElementId a : m.domain(u)) {
            env[slot] = a;
            if (settled(p, static_cast<int>(pos), u, env, &cache)) {
                continue;
            }
            if (!block_assign(p, pos + 1, u, env, have_fresh || m.is_fresh(a), cache)) {
                return false;
            }
        }
        return true;
    }

    bool eval(const Prog& p, NodeIndex w, Env& env)
    {
        using Op = Prog::Op;
        switch (p.op) {
        case Op::bot:
            return false;
        case Op::mem:
            return m.has_member(env[static_cast<std::size_t>(p.b)], env[static_cast<std::size_t>(p.a)]);
        case Op::eq:
            return env[static_cast<std::size_t>(p.a)] == env[static_cast<std::size_t>(p.b)];
        case Op::conj:
            for (const auto& k : p.kids) {
                if (!eval(*k, w, env)) {
                    return false;
                }
            }
            return true;
        case Op::disj:
            for (const auto& k : p.kids) {
                if (eval(*k, w, env)) {
                    return true;
                }
            }
            return false;
        case Op::imp:
            return eval_imp(*p.kids[0], *p.kids[1], p.live, w, env);
        case Op::exists: {
            const auto slot = static_cast<std::size_t>(p.var);
            for (ElementId a : m.domain(w)) {
                env[slot] = a;
                if (eval(*p.kids[0], w, env)) {
                    return true;
                }
            }
            return false;
        }
        case Op::bexists: {
            const auto slot = static_cast<std::size_t>(p.var);
            const auto& members = m.members(env[static_cast<std::size_t>(p.a)]);
            for (ElementId a : members) {
                env[slot] = a;
                if (eval(*p.kids[0], w, env)) {
                    return true;
                }
            }
            return false;
        }
        case Op::forall: {
            const auto slot = static_cast<std::size_t>(p.var);
            for (NodeIndex u : frame.cone_preorder(w)) {
                Env e2 = u == w ? env : moved(p.live, env, u);
                // Restrictions from below are covered by persistence.
                const auto range = (u == w || !fast()) ? m.domain(u) : m.fresh(u);
                for (ElementId a : range) {
                    e2[slot] = a;
                    if (!eval(*p.kids[0], u, e2)) {
                        return false;
                    }
                }
            }
            return true;
        }
        case Op::bforall: {
            const auto slot = static_cast<std::size_t>(p.var);
            for (NodeIndex u : frame.cone_preorder(w)) {
                Env e2 = u == w ? env : moved(p.live, env, u);
                const auto& members = m.members(e2[static_cast<std::size_t>(p.a)]);
                for (ElementId a : members) {
                    e2[slot] = a;
                    if (!eval(*p.kids[0], u, e2)) {
                        return false;
                    }
                }
            }
            return true;
        }
        case Op::block:
            for (NodeIndex u : frame.cone_preorder(w)) {
                Env e2 = u == w ? env : moved(p.live, env, u);
                if (settled(p, -1, u, e2)) {
                    continue;
                }
                ConjCache cache(p.conj_need.size());
                if (!block_assign(p, 0, u, e2, u == w, cache)) {
                    return false;
                }
            }
            return true;
        case Op::sentence:
            return contains(sentence_truth(p.sentence), w);
        }
        return false;
    }
};

Evaluator::Evaluator(const BlendedModel& model, Mode mode) : impl_(std::make_unique<Impl>(model, mode)) {}

Evaluator::~Evaluator() = default;

bool Evaluator::force(NodeIndex v, const SetFormula& formula, const Assignment& env)
{
    auto& self = *impl_;
    if (v >= self.frame.size()) {
        throw PreconditionError("unknown node index " + std::to_string(v));
    }
    std::string key;
    for (const auto& [name, x] : env) {
        if (x >= self.m.element_count() || self.m.node_of(x) != v) {
            throw PreconditionError("assignment of " + name + " is not an element based at node "
                                    + std::to_string(self.frame.id(v)));
        }
        key += name + ",";
    }
    auto cache_key = std::make_pair(formula.identity(), key);
    auto it = self.compiled.find(cache_key);
    if (it == self.compiled.end()) {
        Impl::Compiler compiler{self};
        Impl::Scope scope;
        for (const auto& [name, x] : env) {
            scope.emplace_back(name, compiler.next_slot++);
        }
        auto prog = compiler.compile(formula, scope, true);
        it = self.compiled.emplace(cache_key, std::make_pair(formula, prog)).first;
    }
    const ProgPtr prog = it->second.second;
    Env slots(static_cast<std::size_t>(std::max<int>(prog->max_slot + 1, static_cast<int>(env.size()))), 0);
    std::size_t i = 0;
    for (const auto& [name, x] : env) {
        slots[i++] = x;
    }
    return self.eval(*prog, v, slots);
}

NodeSet Evaluator::truth_set(const SetFormula& sentence, bool remember)
{
    auto& self = *impl_;
    using K = SetFormula::Kind;
    if (self.fast()) {
        if (auto it = self.sentence_index.find(sentence.identity()); it != self.sentence_index.end()) {
            return self.sentence_truth(it->second);
        }
        // A connective over sentences already evaluated: apply its clause to their truth sets.
        auto known = [&](const SetFormula& k) -> std::optional<NodeSet> {
            if (k.kind() == K::bottom) {
                return NodeSet{0};
            }
            if (auto it = self.sentence_index.find(k.identity()); it != self.sentence_index.end()) {
                return self.sentence_truth(it->second);
            }
            return std::nullopt;
        };
        const K kind = sentence.kind();
        if (!remember && (kind == K::conj || kind == K::disj || kind == K::imp)) {
            const auto a = known(sentence.lhs());
            const auto b = a ? known(sentence.rhs()) : std::nullopt;
            if (a && b) {
                if (kind == K::conj) {
                    return *a & *b;
                }
                if (kind == K::disj) {
                    return *a | *b;
                }
                NodeSet t = 0;
                for (NodeIndex v = 0; v < self.frame.size(); ++v) {
                    if ((self.frame.cone(v) & *a & ~*b) == 0) {
                        t |= node_bit(v);
                    }
                }
                return t;
            }
        }
    }
    if (!is_sentence(sentence)) {
        throw UnboundError("truth sets need a sentence");
    }
    Impl::Compiler compiler{self};
    Impl::Scope scope;
    auto prog = compiler.compile(sentence, scope, true);
    if (self.fast() && remember) {
        auto ref = self.register_sentence(sentence, prog);
        return self.sentence_truth(ref->sentence);
    }
    return self.evaluate_everywhere(*prog);
}

bool force_set(const BlendedModel& model, NodeIndex v, const SetFormula& formula, const Assignment& env)
{
    return Evaluator(model).force(v, formula, env);
}

NodeSet truth_set(const BlendedModel& model, const SetFormula& sentence)
{
    return Evaluator(model).truth_set(sentence);
}

PersistenceReport check_persistence(const BlendedModel& model, const std::vector<SetFormula>& formulas,
                                    std::size_t samples, std::uint64_t seed)
{
    PersistenceReport report;
    std::mt19937_64 rng(seed);
    Evaluator literal(model, Evaluator::Mode::literal);
    const Frame& frame = model.frame();
    for (const auto& formula : formulas) {
        const auto vars = free_variables(formula);
        for (std::size_t s = 0; s < samples; ++s) {
            const NodeIndex v = std::uniform_int_distribution<NodeIndex>(0, frame.size() - 1)(rng);
            const auto dom = model.domain(v);
            if (dom.empty() && !vars.empty()) {
                continue;
            }
            Assignment env;
            for (const auto& name : vars) {
                env[name] = dom[std::uniform_int_distribution<std::size_t>(0, dom.size() - 1)(rng)];
            }
            ++report.checks;
            if (!literal.force(v, formula, env)) {
                continue;
            }
            for (NodeIndex w : members_of(frame.cone(v))) {
                if (w == v) {
                    continue;
                }
                Assignment moved;
                for (const auto& [name, x] : env) {
                    moved[name] = model.restrict(x, w);
                }
                if (!literal.force(w, formula, moved)) {
                    report.violations.push_back(to_string(formula) + " forced at node " + std::to_string(frame.id(v))
                                                + " but not at node " + std::to_string(frame.id(w)));
                }
            }
        }
    }
    return report;
}

} // namespace kripke

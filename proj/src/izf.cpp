#include "kripke/blended.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <functional>

namespace kripke {

std::string izf_axiom_name(IzfAxiom axiom)
{
    switch (axiom) {
    case IzfAxiom::extensionality:
        return "extensionality";
    case IzfAxiom::empty:
        return "empty";
    case IzfAxiom::pairing:
        return "pairing";
    case IzfAxiom::union_set:
        return "union";
    case IzfAxiom::powerset:
        return "powerset";
    case IzfAxiom::separation:
        return "separation";
    case IzfAxiom::collection:
        return "collection";
    case IzfAxiom::set_induction:
        return "set-induction";
    }
    return "?";
}

IzfAxiom parse_izf_axiom(const std::string& text)
{
    for (auto a : {IzfAxiom::extensionality, IzfAxiom::empty, IzfAxiom::pairing, IzfAxiom::union_set,
                   IzfAxiom::powerset, IzfAxiom::separation, IzfAxiom::collection, IzfAxiom::set_induction}) {
        if (izf_axiom_name(a) == text) {
            return a;
        }
    }
    if (text == "power-set") {
        return IzfAxiom::powerset;
    }
    if (text == "induction") {
        return IzfAxiom::set_induction;
    }
    throw PreconditionError("unknown axiom '" + text + "'");
}

int default_margin(IzfAxiom axiom)
{
    switch (axiom) {
    case IzfAxiom::pairing:
    case IzfAxiom::powerset:
    case IzfAxiom::collection:
        return 1;
    default:
        return 0;
    }
}

std::string verdict_name(Verdict verdict)
{
    switch (verdict) {
    case Verdict::verified:
        return "verified";
    case Verdict::failed:
        return "failed";
    case Verdict::margin_too_small:
        return "margin-too-small";
    }
    return "?";
}

namespace {

using F = SetFormula;

const std::string A = "izf_a";
const std::string B = "izf_b";
const std::string C = "izf_c";
const std::string X = "izf_x";
const std::string Y = "izf_y";

class Checker {
public:
    Checker(const BlendedModel& model, const IzfRequest& request)
        : m_(model), frame_(model.frame()), req_(request), eval_(model)
    {
        report_.axiom = izf_axiom_name(request.axiom);
        report_.margin = request.margin.value_or(default_margin(request.axiom));
        if (report_.margin < 0 || report_.margin > model.rank_cutoff()) {
            throw PreconditionError("margin must lie between 0 and the rank cutoff");
        }
        cutoff_ = model.rank_cutoff() - report_.margin;
    }

    IzfReport run()
    {
        switch (req_.axiom) {
        case IzfAxiom::extensionality:
            extensionality();
            break;
        case IzfAxiom::empty:
            empty();
            break;
        case IzfAxiom::pairing:
            pairing();
            break;
        case IzfAxiom::union_set:
            union_set();
            break;
        case IzfAxiom::powerset:
            powerset();
            break;
        case IzfAxiom::separation:
            separation();
            break;
        case IzfAxiom::collection:
            collection();
            break;
        case IzfAxiom::set_induction:
            set_induction();
            break;
        }
        if (!report_.problems.empty()) {
            report_.verdict = Verdict::failed;
        } else if (report_.too_high > 0) {
            report_.verdict = Verdict::margin_too_small;
        } else {
            report_.verdict = Verdict::verified;
        }
        return report_;
    }

private:
    std::vector<ElementId> params(NodeIndex v, int alpha) const
    {
        auto s = m_.stratum(v, std::max(alpha, 0));
        return {s.begin(), s.end()};
    }

    // Calls body for every assignment of names to elements of D_v^alpha.
    void each_assignment(NodeIndex v, const std::vector<std::string>& names, int alpha,
                         const std::function<void(Assignment&)>& body) const
    {
        const auto pool = params(v, alpha);
        Assignment env;
        std::function<void(std::size_t)> go = [&](std::size_t i) {
            if (i == names.size()) {
                body(env);
                return;
            }
            for (ElementId x : pool) {
                env[names[i]] = x;
                go(i + 1);
            }
        };
        go(0);
    }

    std::vector<std::string> extra_parameters(const std::vector<std::string>& designated) const
    {
        if (!req_.formula) {
            throw PreconditionError(report_.axiom + " needs a formula");
        }
        std::vector<std::string> out;
        for (const auto& name : free_variables(*req_.formula)) {
            if (name == A || name == B || name == C || name == X || name == Y) {
                throw PreconditionError("formula uses the reserved variable " + name);
            }
            if (std::find(designated.begin(), designated.end(), name) == designated.end()) {
                out.push_back(name);
            }
        }
        return out;
    }

    std::string where(NodeIndex v) const { return "node " + std::to_string(frame_.id(v)); }

    // Classifies the witness and, when it is in the domain, checks the claim.
    void witness(NodeIndex v, const ElementSpec& spec, const F& claim, Assignment env, const std::string& name)
    {
        ++report_.instances;
        const auto cls = m_.classify(v, spec);
        switch (cls.kind) {
        case SpecClass::Kind::invalid:
            report_.problems.push_back("witness at " + where(v) + " is not a valid element: " + cls.reason);
            return;
        case SpecClass::Kind::rank_too_high:
            ++report_.too_high;
            return;
        case SpecClass::Kind::in_domain:
            break;
        }
        ++report_.witnesses;
        env[name] = cls.element;
        if (!eval_.force(v, claim, env)) {
            report_.problems.push_back("witness at " + where(v) + " does not satisfy " + to_string(claim));
        }
    }

    void extensionality()
    {
        const F same = F::forall(X, F::iff(F::member(X, A), F::member(X, B)));
        const F claim = F::imp(same, F::equal(A, B));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, {A, B}, cutoff_, [&](Assignment& env) {
                ++report_.instances;
                if (!eval_.force(v, claim, env)) {
                    report_.problems.push_back("extensionality fails at " + where(v) + " for "
                                               + m_.show(env[A]) + ", " + m_.show(env[B]));
                }
            });
        }
    }

    void empty()
    {
        const F claim = F::forall(X, F::neg(F::member(X, C)));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            ElementSpec spec;
            for (NodeIndex w : members_of(frame_.cone(v))) {
                spec[w] = {};
            }
            witness(v, spec, claim, {}, C);
        }
    }

    void pairing()
    {
        const F claim = F::forall(X, F::iff(F::member(X, C), F::disj(F::equal(X, A), F::equal(X, B))));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, {A, B}, cutoff_, [&](Assignment& env) {
                ElementSpec spec;
                for (NodeIndex w : members_of(frame_.cone(v))) {
                    spec[w] = {m_.restrict(env[A], w), m_.restrict(env[B], w)};
                }
                witness(v, spec, claim, env, C);
            });
        }
    }

    void union_set()
    {
        const F claim = F::forall(X, F::iff(F::member(X, B), F::exists(Y, F::conj(F::member(Y, A), F::member(X, Y)))));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, {A}, cutoff_, [&](Assignment& env) {
                ElementSpec spec;
                for (NodeIndex w : members_of(frame_.cone(v))) {
                    auto& list = spec[w];
                    for (ElementId c : m_.value_at(env[A], w)) {
                        const auto& inner = m_.members(c);
                        list.insert(list.end(), inner.begin(), inner.end());
                    }
                }
                witness(v, spec, claim, env, B);
            });
        }
    }

    void powerset()
    {
        const F subset = F::forall(Y, F::imp(F::member(Y, C), F::member(Y, A)));
        const F claim = F::forall(X, F::iff(F::member(X, B), F::forall(Y, F::imp(F::member(Y, X), F::member(Y, A)))));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, {A}, cutoff_, [&](Assignment& env) {
                ElementSpec spec;
                for (NodeIndex w : members_of(frame_.cone(v))) {
                    const ElementId aw = m_.restrict(env[A], w);
                    auto& slot = spec[w];
                    for (ElementId c : m_.domain(w)) {
                        if (eval_.force(w, subset, {{A, aw}, {C, c}})) {
                            slot.push_back(c);
                        }
                    }
                }
                witness(v, spec, claim, env, B);
            });
        }
    }

    static Assignment restricted(const BlendedModel& m, const Assignment& env, NodeIndex w)
    {
        Assignment out;
        for (const auto& [name, x] : env) {
            out[name] = m.restrict(x, w);
        }
        return out;
    }

    void separation()
    {
        const auto extra = extra_parameters({"x"});
        const F& phi = *req_.formula;
        const F claim = F::forall("x", F::iff(F::member("x", C), F::conj(F::member("x", A), phi)));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, extra, cutoff_ - 1, [&](Assignment& ps) {
                for (ElementId a : params(v, cutoff_)) {
                    ElementSpec spec;
                    for (NodeIndex w : members_of(frame_.cone(v))) {
                        Assignment local = restricted(m_, ps, w);
                        auto& slot = spec[w];
                        for (ElementId d : m_.value_at(a, w)) {
                            local["x"] = d;
                            if (eval_.force(w, phi, local)) {
                                slot.push_back(d);
                            }
                        }
                    }
                    Assignment env = ps;
                    env[A] = a;
                    witness(v, spec, claim, env, C);
                }
            });
        }
    }

    void collection()
    {
        const auto extra = extra_parameters({"x", "y"});
        const F& phi = *req_.formula;
        const F hypothesis = F::forall("x", F::imp(F::member("x", A), F::exists("y", phi)));
        const F claim = F::forall("x", F::imp(F::member("x", A), F::exists("y", F::conj(F::member("y", B), phi))));
        const F instance = F::imp(hypothesis, F::exists(B, claim));
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, extra, cutoff_ - 1, [&](Assignment& ps) {
                for (ElementId a : params(v, cutoff_)) {
                    Assignment env = ps;
                    env[A] = a;
                    if (!eval_.force(v, hypothesis, env)) {
                        ++report_.instances;
                        if (!eval_.force(v, instance, env)) {
                            report_.problems.push_back("collection instance fails at " + where(v));
                        }
                        continue;
                    }
                    // The least alpha such that D_w^alpha holds a y for every x in a(w).
                    std::optional<int> alpha;
                    for (int al = 0; al < m_.rank_cutoff() && !alpha; ++al) {
                        bool enough = true;
                        for (NodeIndex w : members_of(frame_.cone(v))) {
                            Assignment local = restricted(m_, env, w);
                            for (ElementId x : m_.value_at(a, w)) {
                                local["x"] = x;
                                bool found = false;
                                for (ElementId y : m_.stratum(w, al)) {
                                    local["y"] = y;
                                    if (eval_.force(w, phi, local)) {
                                        found = true;
                                        break;
                                    }
                                }
                                local.erase("y");
                                if (!found) {
                                    enough = false;
                                    break;
                                }
                            }
                            if (!enough) {
                                break;
                            }
                        }
                        if (enough) {
                            alpha = al;
                        }
                    }
                    if (!alpha) {
                        ++report_.instances;
                        ++report_.too_high;
                        continue;
                    }
                    ElementSpec spec;
                    for (NodeIndex w : members_of(frame_.cone(v))) {
                        auto s = m_.stratum(w, *alpha);
                        spec[w].assign(s.begin(), s.end());
                    }
                    witness(v, spec, claim, env, B);
                }
            });
        }
    }

    void set_induction()
    {
        const auto extra = extra_parameters({"x"});
        const F& phi = *req_.formula;
        // phi(a) is written as forall x (x = a -> phi(x)), which needs no renaming.
        const F at_a = F::forall("x", F::imp(F::equal("x", A), phi));
        const F hypothesis = F::forall(A, F::imp(F::forall("x", F::imp(F::member("x", A), phi)), at_a));
        const F conclusion = F::forall("x", phi);
        const F instance = F::imp(hypothesis, conclusion);
        for (NodeIndex v = 0; v < frame_.size(); ++v) {
            each_assignment(v, extra, cutoff_ - 1, [&](Assignment& ps) {
                ++report_.instances;
                if (!eval_.force(v, instance, ps)) {
                    report_.problems.push_back("set induction instance fails at " + where(v));
                    return;
                }
                if (!eval_.force(v, hypothesis, ps)) {
                    return;
                }
                // Walk the domain in rank order: every element must inherit phi.
                for (ElementId a : m_.domain(v)) {
                    Assignment env = ps;
                    env["x"] = a;
                    if (!eval_.force(v, phi, env)) {
                        report_.problems.push_back("hypothesis forced at " + where(v) + " but phi fails for "
                                                   + m_.show(a));
                        return;
                    }
                }
                ++report_.witnesses;
            });
        }
    }

    const BlendedModel& m_;
    const Frame& frame_;
    const IzfRequest& req_;
    Evaluator eval_;
    IzfReport report_;
    int cutoff_ = 0;
};

} // namespace

IzfReport izf_check(const BlendedModel& model, const IzfRequest& request)
{
    return Checker(model, request).run();
}

} // namespace kripke

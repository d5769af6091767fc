#include "kripke/dejongh.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace kripke {

SetFormula subset_of_one(const std::string& var)
{
    const std::string y = var + "_y";
    const std::string z = var + "_z";
    return SetFormula::forall_in(y, var, SetFormula::forall_in(z, y, SetFormula::bottom()));
}

SetFormula psi(int n)
{
    if (n < 1) {
        throw PreconditionError("psi needs n >= 1");
    }
    std::vector<std::string> xs;
    for (int i = 0; i < n; ++i) {
        xs.push_back("x" + std::to_string(i));
    }
    std::vector<SetFormula> small;
    std::vector<SetFormula> collisions;
    for (int i = 0; i < n; ++i) {
        small.push_back(subset_of_one(xs[static_cast<std::size_t>(i)]));
        for (int j = i + 1; j < n; ++j) {
            collisions.push_back(SetFormula::equal(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]));
        }
    }
    SetFormula body = SetFormula::imp(SetFormula::conj_all(small), SetFormula::disj_any(collisions));
    for (int i = n - 1; i >= 0; --i) {
        body = SetFormula::forall(xs[static_cast<std::size_t>(i)], body);
    }
    return body;
}

ElementId one_of_upset(const BlendedModel& model, NodeIndex v, NodeSet upset)
{
    const Frame& frame = model.frame();
    if ((upset & ~frame.cone(v)) != 0 || !is_upset(frame, upset)) {
        throw PreconditionError("not an upset of the cone of node " + std::to_string(frame.id(v)));
    }
    ElementSpec spec;
    for (NodeIndex w : members_of(frame.cone(v))) {
        spec[w] = {};
        if (contains(upset, w)) {
            spec[w].push_back(model.zero(w));
        }
    }
    const auto cls = model.classify(v, spec);
    if (cls.kind != SpecClass::Kind::in_domain) {
        throw PreconditionError("1^v_X is not in the domain (needs rank cutoff >= 2): " + cls.reason);
    }
    return cls.element;
}

CountingReport counting_check(const BlendedModel& model, Evaluator& eval)
{
    CountingReport report;
    const Frame& frame = model.frame();
    std::size_t largest = 0;
    std::vector<std::size_t> counts(frame.size());
    for (NodeIndex v = 0; v < frame.size(); ++v) {
        counts[v] = upsets(frame, v).size();
        largest = std::max(largest, counts[v]);
    }
    // psi(n+1) for n = 0 .. U_v + 2
    for (std::size_t n = 0; n <= largest + 2; ++n) {
        const NodeSet truth = eval.truth_set(psi(static_cast<int>(n) + 1));
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if (n > counts[v] + 2) {
                continue;
            }
            const bool forced = contains(truth, v);
            report.rows.push_back({v, counts[v], static_cast<int>(n), forced});
            if (forced != (n >= counts[v])) {
                report.failures.push_back("node " + std::to_string(frame.id(v)) + " with U = " + std::to_string(counts[v])
                                          + (forced ? " forces" : " does not force") + " psi_" + std::to_string(n + 1));
            }
        }
    }

    const SetFormula small = subset_of_one("x");
    for (NodeIndex v = 0; v < frame.size(); ++v) {
        std::set<ElementId> ones;
        for (NodeSet x : upsets(frame, v)) {
            ones.insert(one_of_upset(model, v, x));
        }
        if (ones.size() != counts[v]) {
            report.failures.push_back("1^v_X is not injective in X at node " + std::to_string(frame.id(v)));
        }
        for (ElementId x : model.domain(v)) {
            if (eval.force(v, small, {{"x", x}}) && !ones.contains(x)) {
                report.failures.push_back("node " + std::to_string(frame.id(v)) + " forces S(x) for " + model.show(x)
                                          + ", which is no 1^v_X");
            }
        }
    }
    return report;
}

CountingReport counting_check(const BlendedModel& model)
{
    Evaluator eval(model);
    return counting_check(model, eval);
}

Distinguishers height_distinguishers(const BlendedModel& model)
{
    Distinguishers d;
    for (NodeIndex e : members_of(model.frame().end_nodes())) {
        const int k = model.universe(e).height();
        if (k < 1) {
            throw PreconditionError("end universe at node " + std::to_string(model.frame().id(e)) + " is empty");
        }
        d.emplace(e, ordinal_sentence(k - 1));
    }
    return d;
}

std::vector<std::string> distinguisher_problems(const BlendedModel& model, const Distinguishers& d, Evaluator& eval)
{
    std::vector<std::string> problems;
    const Frame& frame = model.frame();
    const NodeSet ends = frame.end_nodes();
    for (NodeIndex e : members_of(ends)) {
        if (!d.contains(e)) {
            problems.push_back("no distinguisher for end-node " + std::to_string(frame.id(e)));
        }
    }
    for (const auto& [i, phi] : d) {
        if (!contains(ends, i)) {
            problems.push_back("distinguisher given for node " + std::to_string(frame.id(i)) + ", not an end-node");
            continue;
        }
        if (!is_sentence(phi)) {
            problems.push_back("distinguisher for node " + std::to_string(frame.id(i)) + " is not a sentence");
            continue;
        }
        const NodeSet truth = eval.truth_set(phi);
        for (NodeIndex j : members_of(ends)) {
            if (contains(truth, j) != (i == j)) {
                problems.push_back("end-node " + std::to_string(frame.id(j)) + (contains(truth, j) ? " forces" : " does not force")
                                   + " the distinguisher of end-node " + std::to_string(frame.id(i)));
            }
        }
    }
    return problems;
}

namespace {

SetFormula chi_unchecked(const BlendedModel& model, NodeIndex v, const Distinguishers& d)
{
    const Frame& frame = model.frame();
    std::vector<SetFormula> parts{psi(static_cast<int>(upsets(frame, v).size()) + 1)};
    for (NodeIndex e : members_of(frame.end_nodes() & ~frame.cone(v))) {
        parts.push_back(SetFormula::neg(d.at(e)));
    }
    return SetFormula::conj_all(parts);
}

} // namespace

SetFormula chi(const BlendedModel& model, NodeIndex v, const Distinguishers& d)
{
    Evaluator eval(model);
    if (auto problems = distinguisher_problems(model, d, eval); !problems.empty()) {
        throw PreconditionError("distinguishers do not separate the end-nodes: " + problems.front());
    }
    return chi_unchecked(model, v, d);
}

std::vector<SetFormula> chi_all(const BlendedModel& model, const Distinguishers& d, Evaluator& eval)
{
    if (auto problems = distinguisher_problems(model, d, eval); !problems.empty()) {
        throw PreconditionError("distinguishers do not separate the end-nodes: " + problems.front());
    }
    std::vector<SetFormula> out;
    for (NodeIndex v = 0; v < model.frame().size(); ++v) {
        out.push_back(chi_unchecked(model, v, d));
    }
    return out;
}

Substitution faithful_substitution(const BlendedModel& model, const Valuation& valuation,
                                   const std::vector<SetFormula>& chis, Evaluator& eval)
{
    const Frame& frame = model.frame();
    check_valuation(frame, valuation);
    Substitution sigma;
    for (const auto& [letter, upset] : valuation) {
        std::vector<SetFormula> parts;
        for (NodeIndex v : minimal_nodes(frame, upset)) {
            parts.push_back(chis.at(v));
        }
        SetFormula image = SetFormula::disj_any(parts);
        const NodeSet truth = eval.truth_set(image);
        if (truth != upset) {
            throw InternalCheckFailure("sigma(" + letter + ") is not faithful to its upset");
        }
        sigma.set(letter, image);
    }
    return sigma;
}

Substitution faithful_substitution(const BlendedModel& model, const Valuation& valuation, const Distinguishers& d)
{
    Evaluator eval(model);
    return faithful_substitution(model, valuation, chi_all(model, d, eval), eval);
}

namespace {

class Images {
public:
    explicit Images(const Substitution& sigma) : sigma_(sigma) {}

    SetFormula of(const PropFormula& f)
    {
        if (auto it = memo_.find(f.identity()); it != memo_.end()) {
            return it->second.second;
        }
        SetFormula out = SetFormula::bottom();
        switch (f.kind()) {
        case PropFormula::Kind::letter:
            out = sigma_.at(f.name());
            break;
        case PropFormula::Kind::bottom:
            break;
        case PropFormula::Kind::conj:
            out = SetFormula::conj(of(f.lhs()), of(f.rhs()));
            break;
        case PropFormula::Kind::disj:
            out = SetFormula::disj(of(f.lhs()), of(f.rhs()));
            break;
        case PropFormula::Kind::imp:
            out = SetFormula::imp(of(f.lhs()), of(f.rhs()));
            break;
        }
        memo_.emplace(f.identity(), std::make_pair(f, out));
        return out;
    }

private:
    const Substitution& sigma_;
    std::unordered_map<const void*, std::pair<PropFormula, SetFormula>> memo_;
};

std::string node_list(const Frame& frame, NodeSet set)
{
    std::string out = "{";
    for (NodeIndex v : members_of(set)) {
        out += (out.size() > 1 ? "," : "") + std::to_string(frame.id(v));
    }
    return out + "}";
}

struct Tally {
    const Frame& frame;
    CorrespondenceReport& report;

    void record(const PropFormula& f, NodeSet prop, NodeSet set)
    {
        ++report.formulas;
        report.checks += frame.size();
        if (prop != set && report.failures.size() < 20) {
            report.failures.push_back(to_string(f) + ": propositional truth set " + node_list(frame, prop)
                                      + ", substituted truth set " + node_list(frame, set));
        }
    }
};

} // namespace

CorrespondenceReport correspondence_check(const BlendedModel& model, const Valuation& valuation,
                                          const Substitution& sigma, int depth, Evaluator& eval)
{
    CorrespondenceReport report;
    const Frame& frame = model.frame();
    check_valuation(frame, valuation);
    std::vector<std::string> names;
    for (const auto& [letter, set] : valuation) {
        names.push_back(letter);
    }
    Images images(sigma);
    Tally tally{frame, report};

    const auto shallow = formula_family(names, std::max(depth - 1, 0));
    std::vector<NodeSet> prop(shallow.size());
    std::vector<SetFormula> image;
    image.reserve(shallow.size());
    for (std::size_t i = 0; i < shallow.size(); ++i) {
        prop[i] = truth_set(frame, valuation, shallow[i]);
        image.push_back(images.of(shallow[i]));
        tally.record(shallow[i], prop[i], eval.truth_set(image[i]));
    }
    if (depth <= 0) {
        return report;
    }

    // Stream depth `depth`: children come from the memoized shallower levels.
    std::size_t level_begin = 0;
    while (level_begin < shallow.size() && kripke::depth(shallow[level_begin]) < depth - 1) {
        ++level_begin;
    }
    const std::size_t level_end = shallow.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
        const NodeSet p = combine_truth_sets(frame, PropFormula::Kind::imp, prop[i], 0);
        const NodeSet s = eval.truth_set(SetFormula::neg(image[i]), false);
        if (p != s) {
            tally.record(PropFormula::neg(shallow[i]), p, s);
        } else {
            ++report.formulas;
            report.checks += frame.size();
        }
    }
    for (auto kind : {PropFormula::Kind::conj, PropFormula::Kind::disj, PropFormula::Kind::imp}) {
        const auto set_kind = kind == PropFormula::Kind::conj   ? SetFormula::Kind::conj
                              : kind == PropFormula::Kind::disj ? SetFormula::Kind::disj
                                                                : SetFormula::Kind::imp;
        for (std::size_t i = 0; i < level_end; ++i) {
            for (std::size_t j = 0; j < level_end; ++j) {
                if (i < level_begin && j < level_begin) {
                    continue;
                }
                const NodeSet p = combine_truth_sets(frame, kind, prop[i], prop[j]);
                const NodeSet s = eval.truth_set(SetFormula::binary(set_kind, image[i], image[j]), false);
                if (p != s) {
                    tally.record(PropFormula::binary(kind, shallow[i], shallow[j]), p, s);
                } else {
                    ++report.formulas;
                    report.checks += frame.size();
                }
            }
        }
    }
    return report;
}

CorrespondenceReport correspondence_check(const BlendedModel& model, const Valuation& valuation,
                                          const Substitution& sigma, const PropFormula& formula, Evaluator& eval)
{
    CorrespondenceReport report;
    const Frame& frame = model.frame();
    Images images(sigma);
    Tally tally{frame, report};
    std::set<const void*> seen;
    std::vector<PropFormula> stack{formula};
    while (!stack.empty()) {
        const PropFormula f = stack.back();
        stack.pop_back();
        if (!seen.insert(f.identity()).second) {
            continue;
        }
        tally.record(f, truth_set(frame, valuation, f), eval.truth_set(images.of(f)));
        if (f.kind() != PropFormula::Kind::letter && f.kind() != PropFormula::Kind::bottom) {
            stack.push_back(f.lhs());
            stack.push_back(f.rhs());
        }
    }
    return report;
}

std::map<NodeIndex, Universe> pipeline_universes(const Frame& frame, std::size_t universe_budget)
{
    std::map<NodeIndex, Universe> out;
    int i = 0;
    for (NodeIndex e : members_of(frame.end_nodes())) {
        out.emplace(e, build_vk(i + 2, universe_budget));
        ++i;
    }
    return out;
}

DejonghResult dejongh_countermodel(const Logic& logic, const PropFormula& formula, std::size_t bound,
                                   const DejonghOptions& options)
{
    DejonghResult result;
    const auto found = logic_member(logic.frame_class(), formula, bound, options.validity);
    result.frames_checked = found.frames_checked;
    if (!found.refuted()) {
        return result;
    }
    Certificate cert;
    cert.logic = logic;
    cert.formula = formula;
    cert.frame = *found.frame;
    cert.valuation = found.countermodel->valuation;
    cert.node = found.countermodel->node;
    cert.rank = options.rank;

    const auto universes = pipeline_universes(cert.frame, options.universe_budget);
    for (const auto& [e, u] : universes) {
        cert.heights[e] = u.height();
    }
    const auto model = BlendedModel::construct(cert.frame, universes, options.rank, options.element_budget);
    Evaluator eval(model);

    // Valuations only mention the letters of the formula; others are not needed.
    const auto counting = counting_check(model, eval);
    if (!counting.ok()) {
        throw InternalCheckFailure("upset counting fails: " + counting.failures.front());
    }
    const auto chis = chi_all(model, height_distinguishers(model), eval);
    for (NodeIndex v = 0; v < cert.frame.size(); ++v) {
        if (eval.truth_set(chis[v]) != cert.frame.cone(v)) {
            throw InternalCheckFailure("chi does not pick out the cone of node " + std::to_string(cert.frame.id(v)));
        }
    }
    cert.sigma = faithful_substitution(model, cert.valuation, chis, eval);

    cert.correspondence = correspondence_check(model, cert.valuation, cert.sigma, options.correspondence_depth, eval);
    const auto own = correspondence_check(model, cert.valuation, cert.sigma, formula, eval);
    cert.correspondence.formulas += own.formulas;
    cert.correspondence.checks += own.checks;
    cert.correspondence.failures.insert(cert.correspondence.failures.end(), own.failures.begin(), own.failures.end());
    if (!cert.correspondence.ok()) {
        throw InternalCheckFailure("correspondence fails: " + cert.correspondence.failures.front());
    }
    cert.image_forced_at_node = force_set(model, cert.node, apply_substitution(formula, cert.sigma));
    if (cert.image_forced_at_node) {
        throw InternalCheckFailure("the substituted formula is forced at the countermodel node");
    }
    result.certificate = std::move(cert);
    return result;
}

bool EmDemoReport::matches_pattern() const
{
    if (frame.size() != 3) {
        return false;
    }
    const NodeIndex root = frame.root();
    const auto& kids = frame.children(root);
    if (kids.size() != 2) {
        return false;
    }
    const auto& r = verdicts.at(root);
    const auto& e0 = verdicts.at(kids[0]);
    const auto& e1 = verdicts.at(kids[1]);
    return !r[0] && !r[1] && !r[2] && e0[0] && !e0[1] && e0[2] && !e1[0] && e1[1] && e1[2];
}

EmDemoReport excluded_middle_demo(int rank)
{
    EmDemoReport report;
    report.frame = star(2);
    std::map<NodeIndex, Universe> universes;
    const auto& kids = report.frame.children(report.frame.root());
    universes.emplace(kids[0], build_vk(3));
    universes.emplace(kids[1], build_vk(4));
    for (const auto& [e, u] : universes) {
        report.heights[e] = u.height();
    }
    const auto model = BlendedModel::construct(report.frame, universes, rank);
    Evaluator eval(model);
    report.phi = ordinal_sentence(2);
    const SetFormula not_phi = SetFormula::neg(report.phi);
    const NodeSet t_phi = eval.truth_set(report.phi);
    const NodeSet t_not = eval.truth_set(not_phi);
    const NodeSet t_em = eval.truth_set(SetFormula::disj(report.phi, not_phi));
    for (NodeIndex v = 0; v < report.frame.size(); ++v) {
        report.verdicts[v] = {contains(t_phi, v), contains(t_not, v), contains(t_em, v)};
    }
    return report;
}

} // namespace kripke

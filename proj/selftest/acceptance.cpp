#include "acceptance.hpp"

#include "oracles.hpp"

#include "kripke/blended.hpp"
#include "kripke/dejongh.hpp"
#include "kripke/errors.hpp"
#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"
#include "kripke/propositional.hpp"
#include "kripke/universes.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace kripke::selftest {

namespace {

// Collects failures; keeps the first few messages.
struct Tally {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what)
    {
        ++checks;
        if (!ok) {
            ++failures;
            if (messages.size() < 5) {
                messages.push_back(what);
            }
        }
    }

    [[nodiscard]] std::string summary(const std::string& extra = "") const
    {
        std::string out = std::to_string(checks) + " checks, " + std::to_string(failures) + " failures";
        if (!extra.empty()) {
            out += "; " + extra;
        }
        for (const auto& m : messages) {
            out += "\n      " + m;
        }
        return out;
    }
};

std::string fmt_seconds(double s)
{
    std::ostringstream out;
    out.precision(3);
    out << s << " s";
    return out.str();
}

std::string frame_name(const Frame& f) { return canonical_code(f); }

std::map<NodeIndex, Universe> heights_to_universes(const Frame& f, const std::vector<int>& heights)
{
    std::map<NodeIndex, Universe> out;
    const auto ends = members_of(f.end_nodes());
    for (std::size_t i = 0; i < ends.size(); ++i) {
        out.emplace(ends[i], build_vk(heights[i]));
    }
    return out;
}

// Every assignment of heights from {2, 3} to the end-nodes.
std::vector<std::vector<int>> height_choices(const Frame& f)
{
    const auto n = static_cast<std::size_t>(node_count(f.end_nodes()));
    std::vector<std::vector<int>> out;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        std::vector<int> h;
        for (std::size_t i = 0; i < n; ++i) {
            h.push_back(((mask >> i) & 1U) ? 3 : 2);
        }
        out.push_back(h);
    }
    return out;
}

std::string heights_name(const std::vector<int>& h)
{
    std::string out;
    for (int k : h) {
        out += (out.empty() ? "" : ",") + std::to_string(k);
    }
    return "(" + out + ")";
}

bool distinct(std::vector<int> h)
{
    std::sort(h.begin(), h.end());
    return std::adjacent_find(h.begin(), h.end()) == h.end();
}

std::vector<int> pipeline_heights(const Frame& f)
{
    std::vector<int> h;
    for (int i = 0; i < node_count(f.end_nodes()); ++i) {
        h.push_back(i + 2);
    }
    return h;
}

std::vector<Valuation> two_letter_valuations(const Frame& f)
{
    std::vector<Valuation> out;
    const auto ups = oracle::upsets(f, f.root());
    for (NodeSet p : ups) {
        for (NodeSet q : ups) {
            out.push_back({{"p", p}, {"q", q}});
        }
    }
    return out;
}

CriterionResult upset_counting()
{
    Tally t;
    std::size_t models = 0;
    for (const Frame& f : enumerate_trees(4)) {
        for (const auto& h : height_choices(f)) {
            const auto model = BlendedModel::construct(f, heights_to_universes(f, h), 2);
            ++models;
            for (NodeIndex v = 0; v < f.size(); ++v) {
                t.expect(upsets(f, v).size() == oracle::upsets(f, v).size(),
                         frame_name(f) + ": upset count at node " + std::to_string(f.id(v)));
            }
            const auto report = counting_check(model);
            for (const auto& row : report.rows) {
                t.expect(row.forced == (static_cast<std::size_t>(row.n) >= row.upset_count),
                         frame_name(f) + " " + heights_name(h) + ": node " + std::to_string(f.id(row.node)) + " psi_"
                             + std::to_string(row.n + 1));
            }
            for (const auto& msg : report.failures) {
                t.expect(false, frame_name(f) + " " + heights_name(h) + ": " + msg);
            }
        }
    }
    return {1, "upset counting", t.failures == 0, t.summary(std::to_string(models) + " models"), 0};
}

CriterionResult node_identification()
{
    Tally t;
    std::size_t models = 0;
    std::size_t rejected = 0;
    auto check_model = [&](const Frame& f, const std::vector<int>& h) {
        const auto model = BlendedModel::construct(f, heights_to_universes(f, h), 2);
        Evaluator eval(model);
        const auto d = height_distinguishers(model);
        if (!distinct(h)) {
            // Isomorphic end universes cannot be told apart by any sentence.
            bool threw = false;
            try {
                (void)chi_all(model, d, eval);
            } catch (const PreconditionError&) {
                threw = true;
            }
            t.expect(threw, frame_name(f) + " " + heights_name(h) + ": chi accepted equal end heights");
            ++rejected;
            return;
        }
        ++models;
        const auto chis = chi_all(model, d, eval);
        for (NodeIndex v = 0; v < f.size(); ++v) {
            t.expect(eval.truth_set(chis[v]) == f.cone(v),
                     frame_name(f) + " " + heights_name(h) + ": chi of node " + std::to_string(f.id(v)));
        }
    };
    for (const Frame& f : enumerate_trees(4)) {
        const auto choices = height_choices(f);
        for (const auto& h : choices) {
            check_model(f, h);
        }
        const auto ph = pipeline_heights(f);
        if (std::find(choices.begin(), choices.end(), ph) == choices.end()) {
            check_model(f, ph);
        }
    }
    return {2, "node identification", t.failures == 0,
            t.summary(std::to_string(models) + " models with distinct end heights, " + std::to_string(rejected)
                      + " with repeated heights rejected"),
            0};
}

CriterionResult faithfulness()
{
    Tally t;
    std::size_t valuations = 0;
    for (const Frame& f : enumerate_trees(4)) {
        const auto model = BlendedModel::construct(f, heights_to_universes(f, pipeline_heights(f)), 2);
        Evaluator eval(model);
        const auto chis = chi_all(model, height_distinguishers(model), eval);
        for (const auto& val : two_letter_valuations(f)) {
            ++valuations;
            try {
                const auto sigma = faithful_substitution(model, val, chis, eval);
                for (const auto& [letter, upset] : val) {
                    t.expect(eval.truth_set(sigma.at(letter)) == upset, frame_name(f) + ": sigma(" + letter + ")");
                }
            } catch (const InternalCheckFailure& e) {
                t.expect(false, frame_name(f) + ": " + e.what());
            }
        }
    }
    return {3, "faithfulness", t.failures == 0, t.summary(std::to_string(valuations) + " valuations"), 0};
}

CriterionResult correspondence()
{
    Tally t;
    std::size_t formulas = 0;
    for (const Frame& f : {star(2), chain(3)}) {
        const auto model = BlendedModel::construct(f, heights_to_universes(f, pipeline_heights(f)), 2);
        Evaluator eval(model);
        const auto chis = chi_all(model, height_distinguishers(model), eval);
        for (const auto& val : two_letter_valuations(f)) {
            const auto sigma = faithful_substitution(model, val, chis, eval);
            const auto report = correspondence_check(model, val, sigma, 3, eval);
            formulas += report.formulas;
            t.checks += report.checks;
            t.failures += report.failures.size();
            for (const auto& m : report.failures) {
                if (t.messages.size() < 5) {
                    t.messages.push_back(frame_name(f) + ": " + m);
                }
            }
        }
    }
    return {4, "correspondence", t.failures == 0, t.summary(std::to_string(formulas) + " formula instances"), 0};
}

CriterionResult pipeline()
{
    Tally t;
    const PropFormula peirce = parse_prop("((p -> q) -> p) -> p");
    struct Case {
        std::string logic;
        PropFormula formula;
        bool refutable;
    };
    const std::vector<Case> cases{
        {"ipc", parse_prop("p | ~p"), true},   {"ipc", peirce, true},         {"ipc", lc_axiom(), true},
        {"lc", peirce, true},                  {"bd:3", bd_axiom(2), true},   {"bd:2", bd_axiom(1), true},
        {"bd:2", bd_axiom(2), false},
    };
    std::size_t certificates = 0;
    for (const auto& c : cases) {
        const Logic logic = parse_logic(c.logic);
        const std::string name = logic.name() + ", " + to_string(c.formula);
        try {
            const auto result = dejongh_countermodel(logic, c.formula, 4);
            t.expect(result.certificate.has_value() == c.refutable,
                     name + (c.refutable ? ": no certificate" : ": unexpected certificate"));
            if (result.certificate) {
                ++certificates;
                const auto& cert = *result.certificate;
                t.expect(cert.correspondence.ok() && cert.correspondence.formulas > 0, name + ": correspondence");
                t.expect(!cert.image_forced_at_node, name + ": image forced at the refuting node");
                t.expect(!force_prop(cert.frame, cert.valuation, cert.node, c.formula), name + ": node forces formula");
            }
        } catch (const std::exception& e) {
            t.expect(false, name + ": " + e.what());
        }
    }
    return {5, "de Jongh pipeline", t.failures == 0, t.summary(std::to_string(certificates) + " certificates"), 0};
}

CriterionResult logic_characterizations()
{
    Tally t;
    auto valid = [&](const Frame& f, const PropFormula& phi, bool expected, const std::string& what) {
        const bool lib = valid_in_frame(f, phi);
        const bool ref = oracle::valid_in_frame(f, phi);
        t.expect(lib == ref, what + " on " + frame_name(f) + ": library and oracle disagree");
        t.expect(lib == expected, what + " on " + frame_name(f) + (expected ? ": refuted" : ": valid"));
    };
    const auto trees5 = enumerate_trees(5);
    for (const Frame& f : trees5) {
        if (FrameClass::linear().contains(f)) {
            valid(f, lc_axiom(), true, "LC axiom");
        }
    }
    valid(star(2), lc_axiom(), false, "LC axiom");
    for (int n = 1; n <= 3; ++n) {
        for (const Frame& f : trees5) {
            if (f.depth() <= n) {
                valid(f, bd_axiom(n), true, "beta_" + std::to_string(n));
            }
        }
        valid(chain(static_cast<std::size_t>(n) + 1), bd_axiom(n), false, "beta_" + std::to_string(n));
    }
    valid(star(3), t_axiom(2), false, "T(2) axiom");
    // Trees of at most three levels whose nodes have at most two successors;
    // covers the exactly-binary ones as well.
    for (const Frame& f : enumerate_trees(7)) {
        bool binary = f.depth() <= 3;
        for (NodeIndex v = 0; v < f.size(); ++v) {
            binary = binary && f.children(v).size() <= 2;
        }
        if (binary) {
            valid(f, t_axiom(2), true, "T(2) axiom");
        }
    }
    return {6, "logic characterizations", t.failures == 0, t.summary(), 0};
}

CriterionResult end_node_agreement(std::uint64_t seed)
{
    Tally t;
    const Universe v3 = build_vk(3);
    std::vector<SetFormula> sentences = sentence_family(2);
    const std::size_t family = sentences.size();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 100; ++i) {
        sentences.push_back(random_set_formula(rng, 3 + i % 2));
    }
    const Frame single = chain(1);
    const Frame fork = star(2);
    const auto m1 = BlendedModel::construct(single, heights_to_universes(single, {3}), 2);
    const auto m2 = BlendedModel::construct(fork, heights_to_universes(fork, {3, 3}), 2);
    Evaluator e1(m1);
    Evaluator e2(m2);
    Evaluator l2(m2, Evaluator::Mode::literal);
    for (const auto& phi : sentences) {
        const bool classical = eval_classical(v3, phi);
        const std::string text = to_string(phi);
        t.expect(contains(e1.truth_set(phi, false), single.root()) == classical, "single node: " + text);
        const NodeSet fast = e2.truth_set(phi, false);
        const NodeSet literal = l2.truth_set(phi, false);
        for (NodeIndex e : members_of(fork.end_nodes())) {
            t.expect(contains(fast, e) == classical, "fork end " + std::to_string(fork.id(e)) + ": " + text);
            t.expect(contains(literal, e) == classical, "fork end (literal) " + std::to_string(fork.id(e)) + ": " + text);
        }
    }
    return {7, "end-node agreement", t.failures == 0 && family >= 500,
            t.summary(std::to_string(family) + " family sentences + 100 random"), 0};
}

CriterionResult izf_checks()
{
    Tally t;
    const Frame fork = star(2);
    const auto model = BlendedModel::construct(fork, heights_to_universes(fork, {3, 3}), 3);
    std::vector<IzfRequest> requests;
    for (auto a : {IzfAxiom::extensionality, IzfAxiom::empty, IzfAxiom::pairing, IzfAxiom::union_set,
                   IzfAxiom::powerset}) {
        requests.push_back({a, std::nullopt, std::nullopt});
    }
    for (const char* s : {"exists y . y in x", "~ exists y . y in x", "x = x", "forall y . (y in x -> exists z . z in y)",
                          "x in p"}) {
        requests.push_back({IzfAxiom::separation, parse_set(s), std::nullopt});
    }
    for (const char* s : {"x in y", "forall z . (z in y <-> z = x)"}) {
        requests.push_back({IzfAxiom::collection, parse_set(s), std::nullopt});
    }
    for (const char* s : {"~ x in x", "exists y . y in x | forall y . ~ y in x"}) {
        requests.push_back({IzfAxiom::set_induction, parse_set(s), std::nullopt});
    }
    std::map<std::string, int> verdicts;
    for (const auto& req : requests) {
        const auto report = izf_check(model, req);
        const std::string name = report.axiom + (req.formula ? " [" + to_string(*req.formula) + "]" : "");
        ++verdicts[verdict_name(report.verdict)];
        t.expect(report.verdict != Verdict::failed,
                 name + ": failed" + (report.problems.empty() ? "" : " (" + report.problems.front() + ")"));
    }
    std::string counts;
    for (const auto& [v, n] : verdicts) {
        counts += (counts.empty() ? "" : ", ") + std::to_string(n) + " " + v;
    }
    return {8, "IZF truncated checks", t.failures == 0, t.summary(counts), 0};
}

CriterionResult excluded_middle()
{
    Tally t;
    const auto report = excluded_middle_demo();
    t.expect(report.matches_pattern(), "verdict pattern differs");
    const auto& root = report.verdicts.at(report.frame.root());
    t.expect(!root[2], "root forces phi | ~phi");
    const auto model = BlendedModel::construct(report.frame, heights_to_universes(report.frame, {3, 4}), 3);
    const SetFormula not_phi = SetFormula::neg(report.phi);
    const std::array<SetFormula, 3> three{report.phi, not_phi, SetFormula::disj(report.phi, not_phi)};
    for (std::size_t i = 0; i < 3; ++i) {
        const NodeSet ref = oracle::truth_set(model, three[i]);
        for (const auto& [v, verdict] : report.verdicts) {
            t.expect(verdict[i] == contains(ref, v), "oracle disagrees at node " + std::to_string(report.frame.id(v)));
        }
    }
    return {9, "excluded-middle demo", t.failures == 0, t.summary(), 0};
}

CriterionResult oracle_equivalences(std::uint64_t seed)
{
    Tally t;
    std::vector<SetFormula> sentences = sentence_family(2);
    std::mt19937_64 rng(seed + 1);
    for (int i = 0; i < 200; ++i) {
        sentences.push_back(random_set_formula(rng, 1 + i % 4));
    }
    for (int k = 0; k <= 4; ++k) {
        const Universe u = build_vk(k);
        for (const auto& phi : sentences) {
            t.expect(eval_classical(u, phi) == oracle::eval_classical(u, phi),
                     "V_" + std::to_string(k) + ": " + to_string(phi));
        }
    }
    for (const Frame& f : enumerate_trees(5)) {
        for (NodeIndex v = 0; v < f.size(); ++v) {
            auto lib = upsets(f, v);
            auto ref = oracle::upsets(f, v);
            std::sort(lib.begin(), lib.end());
            std::sort(ref.begin(), ref.end());
            t.expect(lib == ref, frame_name(f) + ": upsets at node " + std::to_string(f.id(v)));
        }
    }
    const std::vector<std::size_t> expected{1, 1, 2, 4, 9};
    const auto trees = enumerate_trees(5);
    std::string counts;
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto lib = static_cast<std::size_t>(
            std::count_if(trees.begin(), trees.end(), [&](const Frame& f) { return f.size() == n; }));
        const std::size_t ref = oracle::tree_count(n);
        t.expect(lib == ref && lib == expected[n - 1], "tree count for " + std::to_string(n) + " nodes: "
                                                            + std::to_string(lib) + " vs " + std::to_string(ref));
        counts += (counts.empty() ? "" : ",") + std::to_string(lib);
    }
    return {10, "oracle equivalences", t.failures == 0, t.summary("tree counts " + counts), 0};
}

struct Criterion {
    int id;
    double limit_seconds; // 0: none
    std::function<CriterionResult()> run;
};

} // namespace

std::string format_result(const CriterionResult& r)
{
    return std::string(r.pass ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + " " + r.title + " ("
           + fmt_seconds(r.seconds) + "): " + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream* out)
{
    const std::vector<Criterion> criteria{
        {1, 30, upset_counting},
        {2, 0, node_identification},
        {3, 0, faithfulness},
        {4, 60, correspondence},
        {5, 0, pipeline},
        {6, 0, logic_characterizations},
        {7, 0, [&] { return end_node_agreement(options.seed); }},
        {8, 300, izf_checks},
        {9, 0, excluded_middle},
        {10, 0, [&] { return oracle_equivalences(options.seed); }},
    };
    std::vector<CriterionResult> results;
    for (const auto& c : criteria) {
        if (!options.only.empty() && !options.only.contains(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {c.id, "criterion", false, std::string("exception: ") + e.what(), 0};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && r.seconds > c.limit_seconds) {
            r.pass = false;
            r.detail += "; over the " + fmt_seconds(c.limit_seconds) + " runtime target";
        }
        if (out != nullptr) {
            *out << format_result(r) << std::endl;
        }
        results.push_back(r);
    }
    return results;
}

} // namespace kripke::selftest

#pragma once

#include "kripke/blended.hpp"
#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"
#include "kripke/propositional.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kripke {

// forall y in x . forall z in y . bot
SetFormula subset_of_one(const std::string& var);

// forall x0..x{n-1} (S(x0) & ... & S(x{n-1}) -> some x_i = x_j), n >= 1.
SetFormula psi(int n);

// 1^v_X: {0_w} on X and empty elsewhere in the cone of v.
ElementId one_of_upset(const BlendedModel& model, NodeIndex v, NodeSet upset);

struct CountingReport {
    struct Row {
        NodeIndex node;
        std::size_t upset_count;
        int n;
        bool forced;
    };
    std::vector<Row> rows;
    std::vector<std::string> failures;
    [[nodiscard]] bool ok() const { return failures.empty(); }
};

// For every node and n <= U_v + 2: v forces psi(n+1) iff n >= U_v; and every
// x in the domain at v with v forcing S(x) is some 1^v_X.
CountingReport counting_check(const BlendedModel& model, Evaluator& eval);
CountingReport counting_check(const BlendedModel& model);

// End-node -> sentence; required: e_j forces phi_i iff i = j.
using Distinguishers = std::map<NodeIndex, SetFormula>;

// ordinal_sentence(k_e - 1) for the height k_e of each end universe.
Distinguishers height_distinguishers(const BlendedModel& model);
// Problems with the matrix condition, empty when it holds.
std::vector<std::string> distinguisher_problems(const BlendedModel& model, const Distinguishers& d, Evaluator& eval);

// psi(U_v + 1) & ~phi_i for the end-nodes not above v. Throws PreconditionError
// when the distinguishers do not separate the end-nodes.
SetFormula chi(const BlendedModel& model, NodeIndex v, const Distinguishers& d);
// chi for every node; checks the matrix once.
std::vector<SetFormula> chi_all(const BlendedModel& model, const Distinguishers& d, Evaluator& eval);

// sigma(p) = disjunction of chi_v over the minimal nodes of V(p). Verifies
// that each sigma(p) has truth set V(p) and throws InternalCheckFailure if not.
Substitution faithful_substitution(const BlendedModel& model, const Valuation& valuation,
                                   const std::vector<SetFormula>& chis, Evaluator& eval);
Substitution faithful_substitution(const BlendedModel& model, const Valuation& valuation, const Distinguishers& d);

struct CorrespondenceReport {
    std::size_t formulas = 0;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    [[nodiscard]] bool ok() const { return failures.empty(); }
};

// For every formula of depth <= depth over the letters of the valuation and
// every node: force_prop agrees with force_set of the substituted sentence.
// The deepest level is streamed; shallower levels are memoized on both sides.
CorrespondenceReport correspondence_check(const BlendedModel& model, const Valuation& valuation,
                                          const Substitution& sigma, int depth, Evaluator& eval);
// The same agreement for one formula and all its subformulas.
CorrespondenceReport correspondence_check(const BlendedModel& model, const Valuation& valuation,
                                          const Substitution& sigma, const PropFormula& formula, Evaluator& eval);

// End-node i (in node order) gets V_{i+2}.
std::map<NodeIndex, Universe> pipeline_universes(const Frame& frame, std::size_t universe_budget);

struct DejonghOptions {
    int rank = 2;
    int correspondence_depth = 2;
    ValidityOptions validity;
    std::uint64_t element_budget = default_blend_budget();
    std::size_t universe_budget = default_universe_budget;
};

struct Certificate {
    Logic logic;
    PropFormula formula = PropFormula::bottom();
    Frame frame;
    Valuation valuation;
    NodeIndex node = 0;
    std::map<NodeIndex, int> heights;
    int rank = 0;
    Substitution sigma;
    CorrespondenceReport correspondence;
    bool image_forced_at_node = true;
};

struct DejonghResult {
    std::size_t frames_checked = 0;
    std::optional<Certificate> certificate;
};

// Searches the logic's frame class up to the bound for a countermodel to the
// formula and turns the first one into a refutation of its substitution
// instance in a blended model. Throws InternalCheckFailure if any internal
// check of the certificate fails.
DejonghResult dejongh_countermodel(const Logic& logic, const PropFormula& formula, std::size_t bound,
                                   const DejonghOptions& options = {});

struct EmDemoReport {
    SetFormula phi = SetFormula::bottom();
    std::map<NodeIndex, int> heights;
    // node -> (forces phi, forces ~phi, forces phi | ~phi)
    std::map<NodeIndex, std::array<bool, 3>> verdicts;
    Frame frame;
    [[nodiscard]] bool matches_pattern() const;
};

// Fork with V_3 and V_4 at the end-nodes, phi = ordinal_sentence(2).
EmDemoReport excluded_middle_demo(int rank = 3);

} // namespace kripke

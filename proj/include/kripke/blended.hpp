#pragma once

#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"
#include "kripke/universes.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace kripke {

using ElementId = std::uint32_t;

inline constexpr std::uint64_t builtin_blend_budget = 1'000'000;
// builtin_blend_budget unless KRIPKE_BLEND_BUDGET holds a positive integer.
std::uint64_t default_blend_budget();

// Members of an element at each node of its base cone.
using ElementSpec = std::map<NodeIndex, std::vector<ElementId>>;

struct SpecClass {
    enum class Kind { in_domain, rank_too_high, invalid };
    Kind kind = Kind::invalid;
    ElementId element = 0; // when in_domain
    int rank = 0;          // when in_domain or rank_too_high
    std::string reason;
};

class BlendedModel {
public:
    // universes[e] for every end-node e. Throws BudgetExceeded naming the
    // offending node and rank when a stratum estimate exceeds the budget.
    static BlendedModel construct(const Frame& frame, const std::map<NodeIndex, Universe>& universes, int rank_cutoff,
                                  std::uint64_t budget = default_blend_budget());

    [[nodiscard]] const Frame& frame() const { return frame_; }
    [[nodiscard]] int rank_cutoff() const { return cutoff_; }
    [[nodiscard]] const Universe& universe(NodeIndex e) const;
    [[nodiscard]] std::size_t element_count() const { return elements_.size(); }

    [[nodiscard]] NodeIndex node_of(ElementId x) const { return elements_[x].node; }
    // x(base(x)), sorted by id.
    [[nodiscard]] const std::vector<ElementId>& members(ElementId x) const { return elements_[x].members; }
    [[nodiscard]] bool has_member(ElementId x, ElementId y) const;
    // x(w) for w above the base.
    [[nodiscard]] const std::vector<ElementId>& value_at(ElementId x, NodeIndex w) const;
    // Least alpha with x in D_v^alpha.
    [[nodiscard]] int rank(ElementId x) const { return elements_[x].rank; }
    // f_vw
    [[nodiscard]] ElementId restrict(ElementId x, NodeIndex w) const;

    // D_v^alpha for 0 <= alpha <= R.
    [[nodiscard]] std::span<const ElementId> stratum(NodeIndex v, int alpha) const;
    // Quantifier range at v: D_v^R, or all of f_e[M_e] at an end-node.
    [[nodiscard]] std::span<const ElementId> domain(NodeIndex v) const;
    // Elements of domain(u) that are not restrictions of elements of the parent's domain.
    [[nodiscard]] std::span<const ElementId> fresh(NodeIndex u) const { return fresh_[u]; }
    [[nodiscard]] bool is_fresh(ElementId x) const { return elements_[x].fresh; }

    // f_e and its inverse g.
    [[nodiscard]] ElementId embed(NodeIndex e, SetId a) const;
    [[nodiscard]] SetId project(ElementId x) const;

    [[nodiscard]] SpecClass classify(NodeIndex v, const ElementSpec& spec) const;
    // Throws PreconditionError unless the spec is in the domain.
    [[nodiscard]] ElementId element_of(NodeIndex v, const ElementSpec& spec) const;
    [[nodiscard]] ElementSpec spec_of(ElementId x) const;

    [[nodiscard]] ElementId zero(NodeIndex v) const;
    // n_v(w) = {0_w, ..., (n-1)_w}; needs n < R.
    [[nodiscard]] ElementId numeral(NodeIndex v, int n) const;

    // Nested rendering over the base cone, e.g. "<0:{} 1:{[]} 2:{}>" .
    [[nodiscard]] std::string show(ElementId x) const;

    // Re-checks conditions (i)-(iii), ranks, stratum inclusion and restriction
    // coherence for every materialized element. Returns the problems found.
    [[nodiscard]] std::vector<std::string> validate() const;

private:
    struct ElementData {
        NodeIndex node;
        std::vector<ElementId> members;
        std::vector<ElementId> kids; // restriction to each child, in children() order
        int rank;
        bool fresh;
    };
    using Key = std::tuple<NodeIndex, std::vector<ElementId>, std::vector<ElementId>>;

    ElementId intern(NodeIndex v, std::vector<ElementId> members, std::vector<ElementId> kids, int rank);
    [[nodiscard]] std::optional<ElementId> lookup(const Key& key) const;
    [[nodiscard]] std::size_t child_position(NodeIndex v, NodeIndex w) const;

    Frame frame_;
    int cutoff_ = 0;
    std::map<NodeIndex, Universe> universes_;
    std::vector<ElementData> elements_;
    std::map<Key, ElementId> index_;
    // Per node: elements ordered by rank; strata are prefixes.
    std::vector<std::vector<ElementId>> by_rank_;
    std::vector<std::vector<std::size_t>> stratum_size_;
    std::vector<std::vector<ElementId>> fresh_;
    std::map<NodeIndex, std::vector<ElementId>> embedded_;
    // child_pos_[v][w]: position in children(v) of the child towards w.
    std::vector<std::vector<std::size_t>> child_pos_;
};

using Assignment = std::map<std::string, ElementId>;

// The forcing relation. Fast mode uses exact persistence-based shortcuts and
// caches truth sets of closed subformulas; literal mode follows the clauses.
class Evaluator {
public:
    enum class Mode { fast, literal };

    explicit Evaluator(const BlendedModel& model, Mode mode = Mode::fast);
    ~Evaluator();
    Evaluator(const Evaluator&) = delete;
    Evaluator& operator=(const Evaluator&) = delete;

    bool force(NodeIndex v, const SetFormula& formula, const Assignment& env = {});
    // remember = false keeps the sentence itself out of the cache.
    NodeSet truth_set(const SetFormula& sentence, bool remember = true);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

bool force_set(const BlendedModel& model, NodeIndex v, const SetFormula& formula, const Assignment& env = {});
NodeSet truth_set(const BlendedModel& model, const SetFormula& sentence);

struct PersistenceReport {
    std::size_t checks = 0;
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

// For each formula, `samples` random (v, env) pairs: whenever v forces it,
// every w above v must force it under the restricted assignment.
PersistenceReport check_persistence(const BlendedModel& model, const std::vector<SetFormula>& formulas,
                                    std::size_t samples, std::uint64_t seed);

enum class IzfAxiom { extensionality, empty, pairing, union_set, powerset, separation, collection, set_induction };

std::string izf_axiom_name(IzfAxiom axiom);
IzfAxiom parse_izf_axiom(const std::string& text);
int default_margin(IzfAxiom axiom);

enum class Verdict { verified, failed, margin_too_small };
std::string verdict_name(Verdict verdict);

struct IzfRequest {
    IzfAxiom axiom = IzfAxiom::extensionality;
    // Separation: phi(x, params). Collection: phi(x, y, params). Set induction: phi(x, params).
    std::optional<SetFormula> formula;
    std::optional<int> margin;
};

struct IzfReport {
    std::string axiom;
    Verdict verdict = Verdict::verified;
    int margin = 0;
    std::size_t instances = 0;
    std::size_t witnesses = 0;
    std::size_t too_high = 0;
    std::vector<std::string> problems;
};

IzfReport izf_check(const BlendedModel& model, const IzfRequest& request);

} // namespace kripke

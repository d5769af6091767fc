#pragma once

#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kripke {

// Letters to upsets of the frame.
using Valuation = std::map<std::string, NodeSet>;

// Throws FrameError if some V(p) is not an upset.
void check_valuation(const Frame& frame, const Valuation& valuation);

// Clause-by-clause forcing relation.
bool force_prop(const Frame& frame, const Valuation& valuation, NodeIndex v, const PropFormula& formula);

// {v : v forces formula}, computed bottom-up on bitsets.
NodeSet truth_set(const Frame& frame, const Valuation& valuation, const PropFormula& formula);

// Truth set of a binary connective from the truth sets of its arguments.
NodeSet combine_truth_sets(const Frame& frame, PropFormula::Kind kind, NodeSet lhs, NodeSet rhs);

struct Countermodel {
    Valuation valuation;
    NodeIndex node = 0;
};

struct ValidityOptions {
    std::uint64_t valuation_budget = std::uint64_t{1} << 24;
    unsigned jobs = 1;
};

// Number of valuations of the letters of formula that the sweep visits.
std::uint64_t valuation_count(const Frame& frame, const PropFormula& formula);

// Sweeps every persistent valuation of the letters of the formula. The
// countermodel returned is the first one in sweep order regardless of jobs.
std::optional<Countermodel> find_countermodel(const Frame& frame, const PropFormula& formula,
                                              const ValidityOptions& options = {});
bool valid_in_frame(const Frame& frame, const PropFormula& formula, const ValidityOptions& options = {});

struct Logic {
    enum class Kind { ipc, lc, t, bd };
    Kind kind = Kind::ipc;
    int n = 0;

    [[nodiscard]] std::string name() const;
    // The finite trees characterising the logic.
    [[nodiscard]] FrameClass frame_class() const;
};

Logic parse_logic(const std::string& text);

PropFormula lc_axiom();
// Over letters p0..pn.
PropFormula t_axiom(int n);
// beta_n over letters p1..pn and q.
PropFormula bd_axiom(int n);
// Throws PreconditionError for IPC, which has no extra axiom.
PropFormula axiom(const Logic& logic);

struct MembershipResult {
    std::size_t frames_checked = 0;
    std::optional<Frame> frame;
    std::optional<Countermodel> countermodel;

    [[nodiscard]] bool refuted() const { return countermodel.has_value(); }
};

// Validity on every frame of the class up to the bound, smallest frames first.
MembershipResult logic_member(const FrameClass& cls, const PropFormula& formula, std::size_t bound,
                              const ValidityOptions& options = {});

} // namespace kripke

#pragma once

#include "kripke/blended.hpp"
#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"
#include "kripke/propositional.hpp"
#include "kripke/universes.hpp"

#include <cstddef>
#include <vector>

// Slow reference implementations written straight from the definitions. They
// share no code with the library beyond its data types.
namespace kripke::oracle {

// Subsets of the cone of v that are closed upwards, by filtering all subsets.
std::vector<NodeSet> upsets(const Frame& frame, NodeIndex v);

// Rooted unlabeled trees with n nodes: every parent array, deduplicated by
// trying all relabellings.
std::size_t tree_count(std::size_t n);

bool force_prop(const Frame& frame, const Valuation& valuation, NodeIndex v, const PropFormula& f);
// All persistent valuations of the formula's letters over the whole frame.
bool valid_in_frame(const Frame& frame, const PropFormula& f);

bool eval_classical(const Universe& universe, const SetFormula& f, const ClassicalEnv& env = {});

// The forcing clauses verbatim: forall ranges over every w >= v and every
// element of D_w, implication over every w >= v.
bool force_set(const BlendedModel& model, NodeIndex v, const SetFormula& f, const Assignment& env = {});
NodeSet truth_set(const BlendedModel& model, const SetFormula& sentence);

} // namespace kripke::oracle

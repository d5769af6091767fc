#pragma once

#include "kripke/formulas.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kripke {

using SetId = std::uint32_t;

inline constexpr std::size_t default_universe_budget = 4096;

// A finite transitive set of hereditarily finite sets. Elements are numbered
// in Ackermann order, so for V_k the id of a set is its Ackermann code and the
// members of every element have smaller ids.
class Universe {
public:
    // Every member list refers to earlier-or-later entries of the same vector;
    // the lists are validated (transitive, extensional, well-founded) and
    // renumbered into canonical order.
    static Universe from_member_lists(const std::vector<std::vector<std::size_t>>& members);

    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] const std::vector<SetId>& members(SetId a) const { return members_.at(a); }
    [[nodiscard]] bool is_member(SetId a, SetId b) const;
    [[nodiscard]] int rank(SetId a) const { return rank_.at(a); }
    // Max rank + 1; V_k has height k.
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] std::optional<SetId> find(const std::vector<SetId>& sorted_members) const;
    // Elements of rank < alpha, which form an initial segment of the ids.
    [[nodiscard]] std::size_t count_below_rank(int alpha) const;
    // The set as nested brackets, e.g. "{{},{{}}}".
    [[nodiscard]] std::string show(SetId a) const;

private:
    std::vector<std::vector<SetId>> members_;
    std::vector<int> rank_;
    std::map<std::vector<SetId>, SetId> index_;
    int height_ = 0;
};

// The cumulative hierarchy level V_k, k <= 5.
Universe build_vk(int k, std::size_t budget = default_universe_budget);

using ClassicalEnv = std::map<std::string, SetId>;

// Tarskian satisfaction; bounded quantifiers iterate the bounding set.
bool eval_classical(const Universe& universe, const SetFormula& formula, const ClassicalEnv& env = {});

} // namespace kripke

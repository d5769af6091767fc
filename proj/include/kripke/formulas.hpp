#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kripke {

// Propositional formulas over letters, bottom, and the three binary
// connectives. Negation is the derived form (A -> bot). Values are immutable
// and share structure, so copying is cheap and node identity can be used as a
// memoization key.
class PropFormula {
public:
    enum class Kind { letter, bottom, conj, disj, imp };

    static PropFormula letter(std::string name);
    static PropFormula bottom();
    static PropFormula conj(PropFormula lhs, PropFormula rhs);
    static PropFormula disj(PropFormula lhs, PropFormula rhs);
    static PropFormula imp(PropFormula lhs, PropFormula rhs);
    static PropFormula neg(PropFormula arg) { return imp(std::move(arg), bottom()); }
    static PropFormula binary(Kind kind, PropFormula lhs, PropFormula rhs);

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] PropFormula lhs() const;
    [[nodiscard]] PropFormula rhs() const;
    [[nodiscard]] bool is_negation() const;
    [[nodiscard]] const void* identity() const { return node_.get(); }

    friend bool operator==(const PropFormula& a, const PropFormula& b);

private:
    struct Node;
    explicit PropFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct PropFormula::Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

// First-order formulas of the membership language. Atomic formulas relate two
// variables; bounded quantifiers and negation are derived forms.
class SetFormula {
public:
    enum class Kind { member, equal, bottom, conj, disj, imp, exists, forall };

    static SetFormula member(std::string lhs, std::string rhs);
    static SetFormula equal(std::string lhs, std::string rhs);
    static SetFormula bottom();
    static SetFormula conj(SetFormula lhs, SetFormula rhs);
    static SetFormula disj(SetFormula lhs, SetFormula rhs);
    static SetFormula imp(SetFormula lhs, SetFormula rhs);
    static SetFormula exists(std::string var, SetFormula body);
    static SetFormula forall(std::string var, SetFormula body);
    static SetFormula binary(Kind kind, SetFormula lhs, SetFormula rhs);

    static SetFormula neg(SetFormula arg) { return imp(std::move(arg), bottom()); }
    static SetFormula top() { return imp(bottom(), bottom()); }
    static SetFormula iff(const SetFormula& lhs, const SetFormula& rhs);
    // forall var (var in set -> body)
    static SetFormula forall_in(std::string var, const std::string& set, SetFormula body);
    // exists var (var in set & body)
    static SetFormula exists_in(std::string var, const std::string& set, SetFormula body);
    // Right-nested; the empty conjunction is top and the empty disjunction bot.
    static SetFormula conj_all(const std::vector<SetFormula>& parts);
    static SetFormula disj_any(const std::vector<SetFormula>& parts);

    [[nodiscard]] Kind kind() const;
    // Atomic: left and right variable. Quantifier: var() is the bound variable.
    [[nodiscard]] const std::string& left_var() const;
    [[nodiscard]] const std::string& right_var() const;
    [[nodiscard]] const std::string& var() const { return left_var(); }
    [[nodiscard]] SetFormula lhs() const;
    [[nodiscard]] SetFormula rhs() const;
    [[nodiscard]] SetFormula body() const { return lhs(); }
    [[nodiscard]] bool is_negation() const;
    [[nodiscard]] const void* identity() const { return node_.get(); }

    friend bool operator==(const SetFormula& a, const SetFormula& b);

private:
    struct Node;
    explicit SetFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct SetFormula::Node {
    Kind kind;
    std::string left;
    std::string right;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

PropFormula parse_prop(std::string_view text);
SetFormula parse_set(std::string_view text);

std::string to_string(const PropFormula& formula);
std::string to_string(const SetFormula& formula);
// Bound variables renamed _0, _1, ... by binding depth; alpha-equivalent
// formulas print identically.
std::string canonical_string(const SetFormula& formula);
bool alpha_equivalent(const SetFormula& a, const SetFormula& b);

std::set<std::string> letters(const PropFormula& formula);
// Connective nesting depth; letters and bottom have depth 0.
int depth(const PropFormula& formula);

std::set<std::string> free_variables(const SetFormula& formula);
std::set<std::string> bound_variables(const SetFormula& formula);
bool is_sentence(const SetFormula& formula);
int quantifier_depth(const SetFormula& formula);

// Total map from finitely many letters to sentences.
class Substitution {
public:
    Substitution() = default;
    explicit Substitution(std::map<std::string, SetFormula> images);

    void set(const std::string& letter, SetFormula sentence);
    [[nodiscard]] bool defines(const std::string& letter) const { return images_.contains(letter); }
    [[nodiscard]] const SetFormula& at(const std::string& letter) const;
    [[nodiscard]] const std::map<std::string, SetFormula>& images() const { return images_; }

private:
    std::map<std::string, SetFormula> images_;
};

// Homomorphic replacement of letters; shared subformulas stay shared.
SetFormula apply_substitution(const PropFormula& formula, const Substitution& sigma);

// x is transitive, linearly ordered by membership and has exactly n elements.
SetFormula ordinal_formula(int n, const std::string& var);
// The ordinal n exists and the ordinal n+1 does not. Holds in V_k iff k = n+1.
SetFormula ordinal_sentence(int n);

// Formulas of connective depth <= max_depth over the given letters, built from
// letters by negation and the binary connectives. Ordered by depth.
std::vector<PropFormula> formula_family(const std::vector<std::string>& letters, int max_depth);

// Sentences of quantifier depth <= max_quantifier_depth (0..2) over the
// variables x, y: prefixes of quantifiers over quantifier-free matrices of
// connective depth <= 1, plus a layer of quantifiers mixed with connectives.
std::vector<SetFormula> sentence_family(int max_quantifier_depth);

// A random formula with the given free variables available; every variable
// it binds is quantified. Quantifier depth is exactly quantifier_depth;
// max_size only limits the connectives.
SetFormula random_set_formula(std::mt19937_64& rng, int quantifier_depth, const std::vector<std::string>& free = {},
                              int max_size = 12);

} // namespace kripke

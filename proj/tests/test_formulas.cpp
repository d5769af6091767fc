#include <doctest.h>

#include "kripke/errors.hpp"
#include "kripke/formulas.hpp"
#include "kripke/universes.hpp"

using namespace kripke;
using P = PropFormula;
using S = SetFormula;

TEST_SUITE("formulas") {

TEST_CASE("propositional grammar")
{
    CHECK(parse_prop("p -> (q | ~q)") == P::imp(P::letter("p"), P::disj(P::letter("q"), P::imp(P::letter("q"), P::bottom()))));
    CHECK(parse_prop("_|_") == P::bottom());
    CHECK(parse_prop("bot") == P::bottom());
    CHECK(parse_prop("p -> q -> r") == P::imp(P::letter("p"), P::imp(P::letter("q"), P::letter("r"))));
    // ~ binds tighter than &, & tighter than |, | tighter than ->
    CHECK(parse_prop("~p & q | r -> s")
          == P::imp(P::disj(P::conj(P::neg(P::letter("p")), P::letter("q")), P::letter("r")), P::letter("s")));
    CHECK(parse_prop("r1 & r2") == P::conj(P::letter("r1"), P::letter("r2")));
}

TEST_CASE("printing round-trips")
{
    for (const char* text : {"p -> (q | ~q)", "((p -> q) -> p) -> p", "(p -> q) | (q -> p)", "~~p -> p", "p & (q | r)",
                             "(p -> q) -> r", "_|_"}) {
        const auto f = parse_prop(text);
        CHECK(parse_prop(to_string(f)) == f);
        CHECK(to_string(parse_prop(to_string(f))) == to_string(f));
    }
}

TEST_CASE("parse errors carry a position")
{
    CHECK_THROWS_AS(parse_prop("p &"), ParseError);
    CHECK_THROWS_AS(parse_prop("(p"), ParseError);
    CHECK_THROWS_AS(parse_prop("p q"), ParseError);
    CHECK_THROWS_AS(parse_set("forall . x in y"), ParseError);
    try {
        parse_prop("p & & q");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("set grammar")
{
    CHECK(parse_set("forall x in a . bot") == S::forall("x", S::imp(S::member("x", "a"), S::bottom())));
    CHECK(parse_set("exists y . y = y") == S::exists("y", S::equal("y", "y")));
    CHECK(parse_set("x in y & y in x") == S::conj(S::member("x", "y"), S::member("y", "x")));
    const auto f = parse_set("forall x . exists y . (x in y | ~ y = x)");
    CHECK(parse_set(to_string(f)) == f);
    CHECK(free_variables(parse_set("exists y . x in y & z = y")) == std::set<std::string>{"x", "z"});
    CHECK(is_sentence(parse_set("forall x . exists y . x in y")));
    CHECK(quantifier_depth(parse_set("forall x . (exists y . y in x) & exists z . forall w . w in z")) == 3);
}

TEST_CASE("alpha equivalence")
{
    CHECK(alpha_equivalent(parse_set("forall x . exists y . x in y"), parse_set("forall a . exists b . a in b")));
    CHECK_FALSE(alpha_equivalent(parse_set("forall x . exists y . x in y"), parse_set("forall a . exists b . b in a")));
}

TEST_CASE("substitution")
{
    const S phi = parse_set("exists y . y = y");
    Substitution sigma;
    sigma.set("p", phi);
    CHECK(apply_substitution(P::letter("p"), sigma) == phi);
    CHECK(apply_substitution(P::bottom(), sigma) == S::bottom());
    CHECK(apply_substitution(parse_prop("p | ~p"), sigma) == S::disj(phi, S::imp(phi, S::bottom())));
    CHECK_THROWS_AS(apply_substitution(parse_prop("q"), sigma), UnboundError);
    CHECK_THROWS_AS(sigma.set("q", parse_set("x in x")), PreconditionError);
}

TEST_CASE("ordinal sentences in V_k")
{
    // The ordinal n lies in V_k exactly when n < k, so ordinal_sentence(n) holds in V_{n+1} only.
    for (int k = 0; k <= 4; ++k) {
        const Universe u = build_vk(k);
        for (int n = 0; n <= 3; ++n) {
            CHECK_MESSAGE(eval_classical(u, ordinal_sentence(n)) == (k == n + 1), "k=" << k << " n=" << n);
        }
    }
    CHECK(eval_classical(build_vk(3), ordinal_sentence(2)));
    CHECK_FALSE(eval_classical(build_vk(3), ordinal_sentence(1)));
    CHECK(is_sentence(ordinal_sentence(0)));
}

TEST_CASE("formula family sizes")
{
    // Gen(d+1) = Gen(d) + negations + binary combinations of Gen(d)
    auto expected = [](std::size_t letters, int d) {
        std::size_t g = letters;
        for (int i = 0; i < d; ++i) {
            g = g + g + 3 * g * g;
        }
        return g;
    };
    for (int d = 0; d <= 2; ++d) {
        const auto fam = formula_family({"p", "q"}, d);
        std::size_t distinct = 0;
        std::set<std::string> seen;
        for (const auto& f : fam) {
            distinct += seen.insert(to_string(f)).second ? 1 : 0;
            CHECK(depth(f) <= d);
        }
        CHECK(distinct == fam.size());
        // negations and pairs of two shallower formulas count once each
        if (d == 1) {
            CHECK(fam.size() == 2 + 2 + 3 * 4);
        }
        CHECK(fam.size() <= expected(2, d));
    }
    CHECK(formula_family({"p", "q"}, 2).size() == 786);
}

TEST_CASE("sentence family and random sentences")
{
    const auto fam = sentence_family(2);
    CHECK(fam.size() >= 500);
    std::set<std::string> seen;
    for (const auto& f : fam) {
        CHECK(is_sentence(f));
        CHECK(quantifier_depth(f) <= 2);
        seen.insert(canonical_string(f));
    }
    CHECK(seen.size() == fam.size());
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto f = random_set_formula(rng, 3);
        CHECK(is_sentence(f));
        CHECK(quantifier_depth(f) == 3);
    }
    std::mt19937_64 a(9);
    std::mt19937_64 b(9);
    CHECK(to_string(random_set_formula(a, 2, {"u"})) == to_string(random_set_formula(b, 2, {"u"})));
}

}

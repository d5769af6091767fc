#include <doctest.h>

#include "oracles.hpp"

#include "kripke/errors.hpp"
#include "kripke/universes.hpp"

using namespace kripke;

TEST_SUITE("universes") {

TEST_CASE("cumulative hierarchy")
{
    CHECK(build_vk(0).size() == 0);
    CHECK(build_vk(1).size() == 1);
    const Universe v2 = build_vk(2);
    REQUIRE(v2.size() == 2);
    CHECK(v2.show(0) == "{}");
    CHECK(v2.show(1) == "{{}}");
    CHECK(build_vk(3).size() == 4);
    CHECK(build_vk(4).size() == 16);
    for (int k = 0; k <= 4; ++k) {
        CHECK(build_vk(k).height() == k);
    }
    CHECK_THROWS_AS(build_vk(5), BudgetExceeded);
    CHECK(build_vk(5, 70000).size() == 65536);
    CHECK_THROWS_AS(build_vk(6, 1 << 20), PreconditionError);
}

TEST_CASE("from member lists")
{
    // {∅, {∅}, {{∅}}} listed out of order
    const Universe u = Universe::from_member_lists({{2}, {}, {1}});
    CHECK(u.size() == 3);
    CHECK(u.height() == 3);
    CHECK(u.rank(0) == 0);
    CHECK(u.show(2) == "{{{}}}");
    CHECK_THROWS_AS(Universe::from_member_lists({{1}, {0}}), PreconditionError);      // ill-founded
    CHECK_THROWS_AS(Universe::from_member_lists({{}, {}}), PreconditionError);        // not extensional
    CHECK_THROWS_AS(Universe::from_member_lists({{}, {3}}), PreconditionError);       // out of range
}

TEST_CASE("classical evaluation")
{
    const Universe v3 = build_vk(3);
    CHECK(eval_classical(v3, ordinal_sentence(2)));
    const auto pair = parse_set(
        "exists y . forall x . (x in y <-> (forall z . ~ z in x) | exists w . (w in x & forall z . ~ z in w) & forall w . (w in x -> forall z . ~ z in w))");
    CHECK(eval_classical(v3, pair));
    CHECK_FALSE(eval_classical(build_vk(2), pair));
    const auto ext = parse_set("forall a . forall b . (forall x . (x in a <-> x in b)) -> a = b");
    for (int k = 0; k <= 4; ++k) {
        CHECK(eval_classical(build_vk(k), ext));
    }
    CHECK_THROWS_AS(eval_classical(v3, parse_set("x in x")), UnboundError);
    CHECK(eval_classical(v3, parse_set("x in y"), {{"x", 0}, {"y", 1}}));
}

TEST_CASE("agrees with the naive evaluator")
{
    std::vector<SetFormula> sentences = sentence_family(2);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        sentences.push_back(random_set_formula(rng, 1 + i % 3));
    }
    for (int k = 0; k <= 4; ++k) {
        const Universe u = build_vk(k);
        for (const auto& f : sentences) {
            REQUIRE(eval_classical(u, f) == oracle::eval_classical(u, f));
        }
    }
}

}

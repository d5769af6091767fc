#include <doctest.h>

#include "oracles.hpp"

#include "kripke/blended.hpp"
#include "kripke/dejongh.hpp"
#include "kripke/errors.hpp"

#include <algorithm>
#include <functional>
#include <random>

using namespace kripke;

namespace {

BlendedModel fork_model(int k0, int k1, int rank)
{
    const Frame f = star(2);
    const auto ends = members_of(f.end_nodes());
    return BlendedModel::construct(f, {{ends[0], build_vk(k0)}, {ends[1], build_vk(k1)}}, rank);
}

} // namespace

TEST_SUITE("blended") {

TEST_CASE("small models")
{
    const auto m = fork_model(1, 1, 1);
    const Frame& f = m.frame();
    CHECK(m.stratum(f.root(), 1).size() == 1);
    for (NodeIndex e : members_of(f.end_nodes())) {
        CHECK(m.stratum(e, 1).size() == 1);
    }

    const Frame single = chain(1);
    const auto s = BlendedModel::construct(single, {{single.root(), build_vk(2)}}, 2);
    CHECK(s.domain(single.root()).size() == 2);

    // Monotone choices of {} or {0} per node: the upsets of the fork.
    const auto m2 = fork_model(2, 2, 2);
    CHECK(m2.stratum(m2.frame().root(), 2).size() == 5);
    CHECK(m2.validate().empty());
}

TEST_CASE("stratum sizes by brute force")
{
    // D_v^a: coherent choices x(w) subset of D_w^{a-1} at every w above v, with
    // restrictions carried along, counted by enumerating every assignment.
    const auto m = fork_model(2, 3, 2);
    const Frame& f = m.frame();
    for (int a = 1; a <= 2; ++a) {
        for (NodeIndex v = 0; v < f.size(); ++v) {
            const auto cone = members_of(f.cone(v));
            std::vector<std::vector<ElementId>> below(f.size());
            for (NodeIndex w : cone) {
                const auto s = m.stratum(w, a - 1);
                below[w].assign(s.begin(), s.end());
            }
            std::size_t count = 0;
            std::vector<std::uint64_t> pick(f.size(), 0);
            std::function<void(std::size_t)> rec = [&](std::size_t i) {
                if (i == cone.size()) {
                    // coherence: y in x(w) implies restrict(y, u) in x(u) for u above w
                    for (NodeIndex w : cone) {
                        for (std::size_t j = 0; j < below[w].size(); ++j) {
                            if (!((pick[w] >> j) & 1U)) {
                                continue;
                            }
                            for (NodeIndex u : cone) {
                                if (u == w || !f.le(w, u)) {
                                    continue;
                                }
                                const ElementId r = m.restrict(below[w][j], u);
                                const auto& bu = below[u];
                                const auto it = std::find(bu.begin(), bu.end(), r);
                                if (it == bu.end() || !((pick[u] >> (it - bu.begin())) & 1U)) {
                                    return;
                                }
                            }
                        }
                    }
                    ++count;
                    return;
                }
                const NodeIndex w = cone[i];
                for (std::uint64_t s = 0; s < (std::uint64_t{1} << below[w].size()); ++s) {
                    pick[w] = s;
                    rec(i + 1);
                }
            };
            rec(0);
            if (f.is_end(v)) {
                // end strata are the sets of rank < a of the end universe
                CHECK(m.stratum(v, a).size() == m.universe(v).count_below_rank(a));
            } else {
                CHECK_MESSAGE(m.stratum(v, a).size() == count, "node " << f.id(v) << " rank " << a);
            }
        }
    }
}

TEST_CASE("restriction, embedding, projection")
{
    const auto m = fork_model(3, 3, 2);
    const Frame& f = m.frame();
    const NodeIndex r = f.root();
    const auto ends = members_of(f.end_nodes());
    for (ElementId x = 0; x < m.element_count(); ++x) {
        CHECK(m.restrict(x, m.node_of(x)) == x);
        for (NodeIndex w : members_of(f.cone(m.node_of(x)))) {
            for (NodeIndex u : members_of(f.cone(w))) {
                CHECK(m.restrict(m.restrict(x, w), u) == m.restrict(x, u));
            }
        }
    }
    for (NodeIndex e : ends) {
        const Universe& u = m.universe(e);
        for (SetId a = 0; a < u.size(); ++a) {
            CHECK(m.project(m.embed(e, a)) == a);
        }
        CHECK(m.members(m.embed(e, 0)).empty());
    }
    const ElementId one = one_of_upset(m, r, node_bit(ends[0]));
    CHECK(m.restrict(one, ends[0]) == m.embed(ends[0], 1));
    CHECK(m.restrict(one, ends[1]) == m.embed(ends[1], 0));
}

TEST_CASE("element specs")
{
    const auto m = fork_model(2, 2, 2);
    const Frame& f = m.frame();
    const NodeIndex r = f.root();
    for (ElementId x = 0; x < m.element_count(); ++x) {
        CHECK(m.element_of(m.node_of(x), m.spec_of(x)) == x);
    }
    ElementSpec missing;
    missing[r] = {};
    CHECK(m.classify(r, missing).kind == SpecClass::Kind::invalid);
    // a member at the root whose restriction is missing above
    ElementSpec broken;
    const ElementId z = m.zero(r);
    for (NodeIndex w : members_of(f.cone(r))) {
        broken[w] = {};
    }
    broken[r] = {z};
    CHECK(m.classify(r, broken).kind == SpecClass::Kind::invalid);
    CHECK_THROWS_AS((void)m.numeral(r, 2), PreconditionError);
}

TEST_CASE("budget")
{
    const Frame f = star(2);
    const auto ends = members_of(f.end_nodes());
    CHECK_THROWS_AS(BlendedModel::construct(f, {{ends[0], build_vk(3)}, {ends[1], build_vk(4)}}, 9), BudgetExceeded);
    CHECK_THROWS_AS(BlendedModel::construct(f, {{ends[0], build_vk(3)}}, 2), PreconditionError);
}

TEST_CASE("forcing examples")
{
    const auto m = fork_model(2, 2, 2);
    const Frame& f = m.frame();
    const NodeIndex r = f.root();
    Evaluator eval(m);
    const auto small = subset_of_one("x");
    for (NodeSet x : upsets(f, r)) {
        CHECK(eval.force(r, small, {{"x", one_of_upset(m, r, x)}}));
    }
    const auto empty_exists = parse_set("exists x . forall y in x . bot");
    CHECK(eval.truth_set(empty_exists) == f.all());
    CHECK_THROWS_AS(eval.force(r, parse_set("x in x")), UnboundError);
    const ElementId at_end = m.zero(members_of(f.end_nodes())[0]);
    CHECK_THROWS_AS(eval.force(r, parse_set("x = x"), {{"x", at_end}}), PreconditionError);
}

TEST_CASE("end-nodes are classical")
{
    const auto m = fork_model(3, 3, 2);
    Evaluator fast(m);
    Evaluator literal(m, Evaluator::Mode::literal);
    const Universe v3 = build_vk(3);
    for (const auto& phi : sentence_family(2)) {
        const bool c = eval_classical(v3, phi);
        for (NodeIndex e : members_of(m.frame().end_nodes())) {
            REQUIRE(contains(fast.truth_set(phi, false), e) == c);
            REQUIRE(contains(literal.truth_set(phi, false), e) == c);
        }
    }
}

TEST_CASE("fast, literal and naive evaluators agree")
{
    std::mt19937_64 rng(3);
    for (auto [k0, k1, rank] : {std::tuple{2, 2, 2}, std::tuple{2, 3, 2}, std::tuple{3, 3, 2}}) {
        const auto m = fork_model(k0, k1, rank);
        Evaluator fast(m);
        Evaluator literal(m, Evaluator::Mode::literal);
        std::vector<SetFormula> sentences;
        for (int i = 0; i < 60; ++i) {
            sentences.push_back(random_set_formula(rng, 1 + i % 3, {}, 8));
        }
        for (int n = 1; n <= 4; ++n) {
            sentences.push_back(psi(n));
        }
        for (const auto& phi : sentences) {
            const NodeSet ref = oracle::truth_set(m, phi);
            REQUIRE_MESSAGE(fast.truth_set(phi, false) == ref, to_string(phi));
            REQUIRE_MESSAGE(literal.truth_set(phi, false) == ref, to_string(phi));
        }
    }
    const Frame c3 = chain(3);
    const auto m = BlendedModel::construct(c3, {{members_of(c3.end_nodes())[0], build_vk(2)}}, 2);
    Evaluator fast(m);
    for (int i = 0; i < 60; ++i) {
        const auto phi = random_set_formula(rng, 1 + i % 3, {}, 8);
        REQUIRE_MESSAGE(fast.truth_set(phi, false) == oracle::truth_set(m, phi), to_string(phi));
    }
}

TEST_CASE("formulas with free variables")
{
    const auto m = fork_model(2, 3, 2);
    const Frame& f = m.frame();
    Evaluator fast(m);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 80; ++i) {
        const auto phi = random_set_formula(rng, 1 + i % 2, {"a", "b"}, 8);
        for (NodeIndex v = 0; v < f.size(); ++v) {
            const auto dom = m.domain(v);
            for (int s = 0; s < 3; ++s) {
                Assignment env{{"a", dom[rng() % dom.size()]}, {"b", dom[rng() % dom.size()]}};
                REQUIRE(fast.force(v, phi, env) == oracle::force_set(m, v, phi, env));
            }
        }
    }
}

TEST_CASE("persistence")
{
    const auto m = fork_model(2, 3, 2);
    std::mt19937_64 rng(23);
    std::vector<SetFormula> formulas{parse_set("a in b")};
    for (int i = 0; i < 40; ++i) {
        formulas.push_back(random_set_formula(rng, 1 + i % 3, {"a", "b"}, 8));
    }
    const auto report = check_persistence(m, formulas, 5, 99);
    CHECK(report.checks > 0);
    CHECK(report.ok());
    Evaluator eval(m);
    for (const auto& phi : sentence_family(1)) {
        CHECK(is_upset(m.frame(), eval.truth_set(phi)));
    }
}

TEST_CASE("negation from the end-nodes")
{
    // If no end-node above v forces phi, then v forces ~phi.
    const auto m = fork_model(2, 3, 2);
    const Frame& f = m.frame();
    Evaluator eval(m);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const auto phi = random_set_formula(rng, 1 + i % 3, {}, 8);
        const NodeSet t = eval.truth_set(phi, false);
        const NodeSet n = eval.truth_set(SetFormula::neg(phi), false);
        for (NodeIndex v = 0; v < f.size(); ++v) {
            if ((f.ends_above(v) & t) == 0) {
                CHECK(contains(n, v));
            }
        }
    }
}

}

#include <doctest.h>

#include "oracles.hpp"

#include "kripke/errors.hpp"
#include "kripke/propositional.hpp"

using namespace kripke;

namespace {

NodeSet ends_set(const Frame& f, std::initializer_list<std::size_t> which)
{
    const auto ends = members_of(f.end_nodes());
    NodeSet s = 0;
    for (std::size_t i : which) {
        s |= node_bit(ends[i]);
    }
    return s;
}

} // namespace

TEST_SUITE("propositional") {

TEST_CASE("forcing examples")
{
    const Frame fork = star(2);
    const Valuation v{{"p", ends_set(fork, {0})}};
    CHECK_FALSE(force_prop(fork, v, fork.root(), parse_prop("p | ~p")));
    CHECK(force_prop(fork, v, fork.root(), parse_prop("p -> p")));
    CHECK(force_prop(fork, v, members_of(fork.end_nodes())[0], parse_prop("p | ~p")));

    const Frame c2 = chain(2);
    const Valuation w{{"p", c2.end_nodes()}, {"q", 0}};
    CHECK_FALSE(force_prop(c2, w, c2.root(), parse_prop("((p -> q) -> p) -> p")));
}

TEST_CASE("valuations must be persistent and total")
{
    const Frame c2 = chain(2);
    CHECK_THROWS_AS(check_valuation(c2, {{"p", node_bit(c2.root())}}), FrameError);
    CHECK_THROWS_AS(force_prop(c2, {}, c2.root(), parse_prop("p")), UnboundError);
}

TEST_CASE("truth sets agree with the clause-by-clause oracle")
{
    const auto family = formula_family({"p", "q"}, 2);
    for (const Frame& f : enumerate_trees(4)) {
        const auto ups = oracle::upsets(f, f.root());
        for (NodeSet p : ups) {
            for (NodeSet q : ups) {
                const Valuation val{{"p", p}, {"q", q}};
                for (const auto& phi : family) {
                    const NodeSet t = truth_set(f, val, phi);
                    CHECK(is_upset(f, t));
                    for (NodeIndex v = 0; v < f.size(); ++v) {
                        REQUIRE(contains(t, v) == oracle::force_prop(f, val, v, phi));
                    }
                }
            }
        }
    }
}

TEST_CASE("persistence of depth-3 formulas on trees up to 5 nodes")
{
    // Depth-3 formulas are op(A, B) with A, B of depth <= 2; forcing of op(A, B)
    // depends only on the truth sets of A and B, so one representative per
    // distinct pair of truth sets covers every case.
    const auto family = formula_family({"p", "q"}, 2);
    for (const Frame& f : enumerate_trees(5)) {
        const auto ups = oracle::upsets(f, f.root());
        for (NodeSet p : ups) {
            for (NodeSet q : ups) {
                const Valuation val{{"p", p}, {"q", q}};
                std::map<NodeSet, PropFormula> reps;
                for (const auto& phi : family) {
                    reps.emplace(truth_set(f, val, phi), phi);
                }
                for (const auto& [ta, a] : reps) {
                    CHECK(is_upset(f, truth_set(f, val, PropFormula::neg(a))));
                    for (const auto& [tb, b] : reps) {
                        for (auto kind : {PropFormula::Kind::conj, PropFormula::Kind::disj, PropFormula::Kind::imp}) {
                            const NodeSet t = truth_set(f, val, PropFormula::binary(kind, a, b));
                            REQUIRE(is_upset(f, t));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("validity and countermodels")
{
    CHECK(valid_in_frame(chain(1), parse_prop("p | ~p")));
    const Frame fork = star(2);
    const auto cm = find_countermodel(fork, lc_axiom());
    REQUIRE(cm.has_value());
    CHECK(cm->node == fork.root());
    const NodeSet vp = cm->valuation.at("p");
    const NodeSet vq = cm->valuation.at("q");
    CHECK(node_count(vp) == 1);
    CHECK(node_count(vq) == 1);
    CHECK(vp != vq);
    CHECK((vp & fork.end_nodes()) == vp);
    CHECK_FALSE(force_prop(fork, cm->valuation, cm->node, lc_axiom()));

    CHECK_FALSE(valid_in_frame(chain(3), bd_axiom(2)));
    CHECK(valid_in_frame(chain(2), bd_axiom(2)));
}

TEST_CASE("parallel sweep finds the same first countermodel")
{
    ValidityOptions serial;
    ValidityOptions parallel{serial.valuation_budget, 3};
    const auto f = parse_prop("(p -> q) | (q -> r) | (r -> p)");
    for (const Frame& fr : {star(3), frame_from_parents({-1, 0, 0, 0, 1})}) {
        const auto a = find_countermodel(fr, f, serial);
        const auto b = find_countermodel(fr, f, parallel);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            CHECK(a->valuation == b->valuation);
            CHECK(a->node == b->node);
        }
    }
}

TEST_CASE("valuation budget")
{
    ValidityOptions tight{10, 1};
    CHECK_THROWS_AS(find_countermodel(star(3), t_axiom(2), tight), BudgetExceeded);
}

TEST_CASE("axioms")
{
    CHECK(bd_axiom(1) == parse_prop("((p1 -> q) -> p1) -> p1"));
    CHECK(lc_axiom() == parse_prop("(p -> q) | (q -> p)"));
    CHECK(axiom(parse_logic("bd:1")) == bd_axiom(1));
    CHECK_THROWS_AS(axiom(parse_logic("ipc")), PreconditionError);
    CHECK(parse_logic("T(2)").kind == Logic::Kind::t);
    CHECK(parse_logic("bd2").n == 2);
    CHECK(parse_logic("LC").name() == "LC");
    CHECK_THROWS(parse_logic("s4"));

    // T(1) and LC pick out the same trees
    for (const Frame& f : enumerate_trees(4)) {
        const bool linear = FrameClass::linear().contains(f);
        CHECK(valid_in_frame(f, t_axiom(1)) == linear);
        CHECK(valid_in_frame(f, lc_axiom()) == linear);
        CHECK(oracle::valid_in_frame(f, t_axiom(1)) == linear);
    }
}

TEST_CASE("logic membership")
{
    const auto lc = logic_member(FrameClass::linear(), lc_axiom(), 5);
    CHECK_FALSE(lc.refuted());
    CHECK(lc.frames_checked == 5);

    const auto em = logic_member(FrameClass::all_trees(), parse_prop("p | ~p"), 2);
    REQUIRE(em.refuted());
    CHECK(canonical_code(*em.frame) == canonical_code(chain(2)));

    CHECK_FALSE(logic_member(FrameClass::depth_at_most(2), bd_axiom(2), 5).refuted());
    CHECK(logic_member(FrameClass::depth_at_most(3), bd_axiom(2), 5).refuted());
}

}

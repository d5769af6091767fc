#include <doctest.h>

#include "kripke/blended.hpp"
#include "kripke/errors.hpp"

using namespace kripke;

namespace {

BlendedModel small_fork(int rank)
{
    const Frame f = star(2);
    const auto ends = members_of(f.end_nodes());
    return BlendedModel::construct(f, {{ends[0], build_vk(2)}, {ends[1], build_vk(3)}}, rank);
}

IzfReport run(const BlendedModel& m, IzfAxiom a, const char* formula = nullptr, std::optional<int> margin = {})
{
    IzfRequest req;
    req.axiom = a;
    if (formula != nullptr) {
        req.formula = parse_set(formula);
    }
    req.margin = margin;
    return izf_check(m, req);
}

} // namespace

TEST_SUITE("izf") {

TEST_CASE("axiom names")
{
    for (auto a : {IzfAxiom::extensionality, IzfAxiom::empty, IzfAxiom::pairing, IzfAxiom::union_set,
                   IzfAxiom::powerset, IzfAxiom::separation, IzfAxiom::collection, IzfAxiom::set_induction}) {
        CHECK(parse_izf_axiom(izf_axiom_name(a)) == a);
    }
    CHECK(parse_izf_axiom("induction") == IzfAxiom::set_induction);
    CHECK_THROWS_AS(parse_izf_axiom("choice"), PreconditionError);
    CHECK(verdict_name(Verdict::margin_too_small) == "margin-too-small");
}

TEST_CASE("axioms hold in a small model")
{
    const auto m = small_fork(2);
    for (auto a : {IzfAxiom::extensionality, IzfAxiom::empty, IzfAxiom::union_set}) {
        const auto r = run(m, a);
        CHECK_MESSAGE(r.verdict == Verdict::verified, r.axiom);
        CHECK(r.instances > 0);
        CHECK(r.problems.empty());
    }
    for (const char* phi : {"x = x", "exists y . y in x", "~ exists y . y in x", "x in p"}) {
        const auto r = run(m, IzfAxiom::separation, phi);
        CHECK_MESSAGE(r.verdict != Verdict::failed, phi);
    }
    for (const char* phi : {"~ x in x", "forall y in x . ~ y = y"}) {
        CHECK(run(m, IzfAxiom::set_induction, phi).verdict != Verdict::failed);
    }
    CHECK(run(m, IzfAxiom::pairing).verdict != Verdict::failed);
    CHECK(run(m, IzfAxiom::collection, "x = y").verdict != Verdict::failed);
}

TEST_CASE("pairs of top-rank elements leave the model")
{
    const auto m = small_fork(2);
    const auto r = run(m, IzfAxiom::pairing, nullptr, 0);
    CHECK(r.verdict == Verdict::margin_too_small);
    CHECK(r.too_high > 0);
    CHECK(run(m, IzfAxiom::pairing, nullptr, 1).too_high == 0);
}

TEST_CASE("bad requests")
{
    const auto m = small_fork(2);
    CHECK_THROWS_AS(run(m, IzfAxiom::separation), PreconditionError);
    CHECK_THROWS_AS(run(m, IzfAxiom::separation, "x in izf_a"), PreconditionError);
    CHECK_THROWS_AS(run(m, IzfAxiom::empty, nullptr, 3), PreconditionError);
    CHECK_THROWS_AS(run(m, IzfAxiom::empty, nullptr, -1), PreconditionError);
}

}

#include <doctest.h>

#include "oracles.hpp"

#include "kripke/dejongh.hpp"
#include "kripke/errors.hpp"

using namespace kripke;

namespace {

BlendedModel model_on(const Frame& f, const std::vector<int>& heights, int rank)
{
    std::map<NodeIndex, Universe> us;
    const auto ends = members_of(f.end_nodes());
    for (std::size_t i = 0; i < ends.size(); ++i) {
        us.emplace(ends[i], build_vk(heights[i % heights.size()]));
    }
    return BlendedModel::construct(f, us, rank);
}

} // namespace

TEST_SUITE("dejongh") {

TEST_CASE("psi counts the upsets")
{
    // v forces psi(n+1) iff the cone of v has at most n upsets
    for (const Frame& f : {chain(1), chain(2), star(2)}) {
        const auto m = model_on(f, {2}, 2);
        for (int n = 1; n <= 6; ++n) {
            const NodeSet t = oracle::truth_set(m, psi(n));
            for (NodeIndex v = 0; v < f.size(); ++v) {
                const auto u = oracle::upsets(f, v).size();
                CHECK_MESSAGE(contains(t, v) == (static_cast<std::size_t>(n) > u), "n=" << n << " node " << f.id(v));
            }
        }
    }
}

TEST_CASE("psi shape")
{
    CHECK(is_sentence(psi(1)));
    CHECK(quantifier_depth(psi(3)) == 5);
    CHECK(free_variables(subset_of_one("x")) == std::set<std::string>{"x"});
    CHECK_THROWS_AS(psi(0), PreconditionError);
}

TEST_CASE("ones of upsets")
{
    const auto m = model_on(star(2), {2, 3}, 2);
    const Frame& f = m.frame();
    const NodeIndex r = f.root();
    std::set<ElementId> seen;
    for (NodeSet x : oracle::upsets(f, r)) {
        const ElementId one = one_of_upset(m, r, x);
        CHECK(seen.insert(one).second);
        for (NodeIndex w : members_of(f.cone(r))) {
            const auto& val = m.value_at(one, w);
            if (contains(x, w)) {
                REQUIRE(val.size() == 1);
                CHECK(m.members(val[0]).empty());
            } else {
                CHECK(val.empty());
            }
        }
    }
    const NodeIndex e = members_of(f.end_nodes())[0];
    CHECK_THROWS_AS(one_of_upset(m, r, node_bit(r)), PreconditionError);
    CHECK_THROWS_AS(one_of_upset(m, e, node_bit(r)), PreconditionError);
    const auto low = model_on(star(2), {2, 3}, 1);
    CHECK_THROWS_AS(one_of_upset(low, low.frame().root(), low.frame().all()), PreconditionError);
}

TEST_CASE("counting")
{
    for (const Frame& f : {chain(3), star(2), star(3), frame_from_parents({-1, 0, 0, 1})}) {
        std::vector<int> hs;
        for (std::size_t i = 0; i < members_of(f.end_nodes()).size(); ++i) {
            hs.push_back(static_cast<int>(i) + 2);
        }
        const auto m = model_on(f, hs, 2);
        const auto report = counting_check(m);
        CHECK(report.ok());
        for (const auto& row : report.rows) {
            CHECK(row.upset_count == oracle::upsets(f, row.node).size());
            CHECK(row.forced == (static_cast<std::size_t>(row.n) >= row.upset_count));
        }
    }
    const auto m = model_on(chain(3), {2}, 2);
    std::map<int, std::size_t> counts;
    for (const auto& row : counting_check(m).rows) {
        counts[m.frame().id(row.node)] = row.upset_count;
    }
    CHECK(counts == std::map<int, std::size_t>{{0, 4}, {1, 3}, {2, 2}});
}

TEST_CASE("distinguishers")
{
    const auto m = model_on(star(3), {2, 3, 4}, 2);
    Evaluator eval(m);
    const auto d = height_distinguishers(m);
    CHECK(d.size() == 3);
    CHECK(distinguisher_problems(m, d, eval).empty());
    for (const auto& [e, phi] : d) {
        CHECK((eval.truth_set(phi) & m.frame().end_nodes()) == node_bit(e));
    }
    const auto same = model_on(star(2), {3}, 2);
    Evaluator eval2(same);
    const auto d2 = height_distinguishers(same);
    CHECK_FALSE(distinguisher_problems(same, d2, eval2).empty());
    CHECK_THROWS_AS(chi_all(same, d2, eval2), PreconditionError);
}

TEST_CASE("chi picks out cones")
{
    for (const Frame& f : {chain(2), chain(3), star(2), frame_from_parents({-1, 0, 0, 1}), frame_from_parents({-1, 0, 1, 1})}) {
        const auto m = BlendedModel::construct(f, pipeline_universes(f, default_universe_budget), 2);
        Evaluator eval(m);
        const auto chis = chi_all(m, height_distinguishers(m), eval);
        for (NodeIndex v = 0; v < f.size(); ++v) {
            CHECK(eval.truth_set(chis[v]) == f.cone(v));
        }
    }
    const Frame fork = star(2);
    const auto m = model_on(fork, {2, 3}, 2);
    const auto d = height_distinguishers(m);
    for (NodeIndex v = 0; v < fork.size(); ++v) {
        CHECK(oracle::truth_set(m, chi(m, v, d)) == fork.cone(v));
    }
}

TEST_CASE("faithful substitutions")
{
    for (const Frame& f : enumerate_trees(4)) {
        const auto m = BlendedModel::construct(f, pipeline_universes(f, default_universe_budget), 2);
        Evaluator eval(m);
        const auto chis = chi_all(m, height_distinguishers(m), eval);
        for (NodeSet x : oracle::upsets(f, f.root())) {
            const auto sigma = faithful_substitution(m, {{"p", x}}, chis, eval);
            CHECK(eval.truth_set(sigma.at("p")) == x);
        }
    }
    const Frame fork = star(2);
    const auto m = model_on(fork, {2, 3}, 2);
    const auto sigma = faithful_substitution(m, {{"p", 0}}, height_distinguishers(m));
    CHECK(to_string(sigma.at("p")) == "bot");
    const NodeSet e0 = node_bit(members_of(fork.end_nodes())[0]);
    const auto s2 = faithful_substitution(m, {{"p", e0}, {"q", fork.end_nodes()}}, height_distinguishers(m));
    CHECK(oracle::truth_set(m, s2.at("p")) == e0);
    CHECK(oracle::truth_set(m, s2.at("q")) == fork.end_nodes());
}

TEST_CASE("correspondence")
{
    const Frame fork = star(2);
    const auto m = model_on(fork, {2, 3}, 2);
    Evaluator eval(m);
    const auto d = height_distinguishers(m);
    const NodeSet e0 = node_bit(members_of(fork.end_nodes())[0]);
    const Valuation val{{"p", e0}, {"q", fork.end_nodes()}};
    const auto sigma = faithful_substitution(m, val, d);
    const auto report = correspondence_check(m, val, sigma, 2, eval);
    CHECK(report.ok());
    CHECK(report.formulas > 100);
    CHECK(report.checks == report.formulas * fork.size());

    const auto em = parse_prop("p | ~p");
    CHECK(correspondence_check(m, val, sigma, em, eval).ok());
    const auto image = apply_substitution(em, sigma);
    CHECK(oracle::truth_set(m, image) == fork.end_nodes());
    CHECK(truth_set(fork, val, em) == fork.end_nodes());

    // a substitution that is not faithful shows up
    Substitution wrong;
    wrong.set("p", SetFormula::top());
    wrong.set("q", SetFormula::top());
    CHECK_FALSE(correspondence_check(m, val, wrong, 1, eval).ok());
}

TEST_CASE("countermodels become set-theoretic refutations")
{
    const auto ipc = parse_logic("ipc");
    const auto lc = parse_logic("lc");
    {
        const auto res = dejongh_countermodel(ipc, parse_prop("p | ~p"), 3);
        REQUIRE(res.certificate);
        const auto& c = *res.certificate;
        CHECK(c.frame.size() == 2);
        CHECK_FALSE(c.image_forced_at_node);
        CHECK(c.correspondence.ok());
        CHECK_FALSE(force_prop(c.frame, c.valuation, c.node, c.formula));
    }
    {
        const auto res = dejongh_countermodel(lc, parse_prop("((p -> q) -> p) -> p"), 3);
        REQUIRE(res.certificate);
        CHECK(res.certificate->frame.size() == 2);
    }
    {
        const auto res = dejongh_countermodel(ipc, parse_prop("(p -> q) | (q -> p)"), 4);
        REQUIRE(res.certificate);
        CHECK(res.certificate->frame.size() == 3);
        CHECK(res.certificate->frame.end_nodes() != 0);
    }
    CHECK_FALSE(dejongh_countermodel(ipc, parse_prop("p -> p"), 4).certificate);
    CHECK_FALSE(dejongh_countermodel(parse_logic("bd:2"), bd_axiom(2), 4).certificate);
}

TEST_CASE("excluded middle fails at the root")
{
    const auto report = excluded_middle_demo();
    CHECK(report.matches_pattern());
    const Frame& f = report.frame;
    CHECK(to_string(report.phi) == to_string(ordinal_sentence(2)));
    std::set<int> heights;
    for (const auto& [e, k] : report.heights) {
        heights.insert(k);
    }
    CHECK(heights == std::set<int>{3, 4});
    std::map<NodeIndex, Universe> us;
    for (const auto& [e, k] : report.heights) {
        us.emplace(e, build_vk(k));
    }
    const auto m = BlendedModel::construct(f, us, 3);
    const auto not_phi = SetFormula::neg(report.phi);
    for (const auto& [v, verdict] : report.verdicts) {
        CHECK(verdict[0] == oracle::force_set(m, v, report.phi));
        CHECK(verdict[1] == oracle::force_set(m, v, not_phi));
        CHECK(verdict[2] == oracle::force_set(m, v, SetFormula::disj(report.phi, not_phi)));
    }
}

}

#include <doctest.h>

#include "kripke/dejongh.hpp"
#include "kripke/errors.hpp"
#include "kripke/io.hpp"

using namespace kripke;

TEST_SUITE("io") {

TEST_CASE("frames")
{
    const Frame fork = star(2);
    const Json j = frame_to_json(fork);
    CHECK(j.dump() == R"({"nodes":[0,1,2],"le":[[0,1],[0,2]],"root":0})");
    for (const Frame& f : enumerate_trees(5)) {
        const Frame back = frame_from_json(frame_to_json(f));
        CHECK(canonical_code(back) == canonical_code(f));
        CHECK(back.order_pairs() == f.order_pairs());
    }
    const Frame given = frame_from_json(Json::parse(R"({"nodes":[7,3,5],"le":[[7,3],[7,5],[3,3]]})"));
    CHECK(given.id(given.root()) == 7);
    CHECK(given.size() == 3);
    CHECK_THROWS_AS(frame_from_json(Json::parse(R"({"le":[]})")), ParseError);
    CHECK_THROWS_AS(frame_from_json(Json::parse(R"({"nodes":[0,"a"]})")), ParseError);
    CHECK_THROWS_AS(frame_from_json(Json::parse(R"({"nodes":[0,1],"le":[[0]]})")), ParseError);
    CHECK_THROWS_AS(frame_from_json(Json::parse(R"({"nodes":[0,1,2],"le":[[1,0],[2,0]]})")), FrameError);
    CHECK_THROWS_AS(read_frame_file("/nonexistent/frame.json"), ParseError);
}

TEST_CASE("universes")
{
    for (int k = 0; k <= 4; ++k) {
        const Universe v = build_vk(k);
        const Universe back = universe_from_json(universe_to_json(v));
        REQUIRE(back.size() == v.size());
        for (SetId a = 0; a < v.size(); ++a) {
            CHECK(back.show(a) == v.show(a));
        }
    }
    CHECK(universe_to_json(build_vk(2)).dump() == "[[],[[]]]");
    // listing order does not matter
    const Universe u = universe_from_json(Json::parse("[[[]],[]]"));
    CHECK(u.show(0) == "{}");
    CHECK_THROWS_AS(universe_from_json(Json::parse("[[[]]]")), PreconditionError);
    CHECK_THROWS_AS(universe_from_json(Json::parse("[[],[]]")), PreconditionError);
    CHECK_THROWS_AS(universe_from_json(Json::parse("[[[],[]],[]]")), ParseError);
    CHECK_THROWS_AS(universe_from_json(Json::parse("[1]")), ParseError);
    CHECK_THROWS_AS(universe_from_json(Json::parse("{}")), ParseError);
}

TEST_CASE("valuations")
{
    const Frame fork = star(2);
    const Valuation v{{"p", fork.end_nodes()}, {"q", 0}};
    const Json j = valuation_to_json(fork, v);
    CHECK(j.dump() == R"({"p":[1,2],"q":[]})");
    CHECK(valuation_from_json(fork, j) == v);
    CHECK_THROWS_AS(valuation_from_json(fork, Json::parse(R"({"p":[0]})")), FrameError);
    CHECK_THROWS_AS(valuation_from_json(fork, Json::parse(R"({"p":["x"]})")), ParseError);
    CHECK_THROWS_AS(valuation_from_json(fork, Json::parse("[1]")), ParseError);
}

TEST_CASE("model reports are reproducible")
{
    const Frame fork = star(2);
    const auto ends = members_of(fork.end_nodes());
    const auto m = BlendedModel::construct(fork, {{ends[0], build_vk(2)}, {ends[1], build_vk(2)}}, 2);
    const Json a = model_report(m, 50, 7);
    CHECK(a.dump() == model_report(m, 50, 7).dump());
    CHECK(a["rank_cutoff"] == 2);
    CHECK(a["nodes"][0]["stratum_sizes"] == Json::parse("[1,5]"));
    CHECK(a["spot_checks"]["checked"] == 50);
    CHECK(a["spot_checks"]["failures"].empty());
}

TEST_CASE("certificates")
{
    const auto res = dejongh_countermodel(parse_logic("ipc"), parse_prop("p | ~p"), 3);
    REQUIRE(res.certificate);
    const Json j = certificate_to_json(*res.certificate);
    CHECK(j["logic"] == "IPC");
    CHECK(j["image_forced_at_refuting_node"] == false);
    CHECK(j["correspondence"]["failures"].empty());
    const Frame back = frame_from_json(j["frame"]);
    const Valuation val = valuation_from_json(back, j["valuation"]);
    CHECK_FALSE(force_prop(back, val, back.index_of(j["refuting_node"].get<int>()), parse_prop("p | ~p")));
    CHECK(j["sigma"].contains("p"));
}

}

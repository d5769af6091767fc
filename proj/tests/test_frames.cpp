#include <doctest.h>

#include "oracles.hpp"

#include "kripke/errors.hpp"
#include "kripke/frames.hpp"

#include <algorithm>

using namespace kripke;

namespace {

NodeSet ids_to_set(const Frame& f, std::initializer_list<int> ids)
{
    NodeSet s = 0;
    for (int id : ids) {
        s |= node_bit(f.index_of(id));
    }
    return s;
}

} // namespace

TEST_SUITE("frames") {

TEST_CASE("validation")
{
    const Frame fork = validate_tree({0, 1, 2}, {{0, 1}, {0, 2}});
    CHECK(fork.size() == 3);
    CHECK(fork.id(fork.root()) == 0);
    CHECK(fork.end_nodes() == ids_to_set(fork, {1, 2}));
    CHECK(fork.depth() == 2);

    CHECK_THROWS_WITH_AS(validate_tree({0, 1, 2, 3}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}), doctest::Contains("non-linear past"),
                         FrameError);
    CHECK_THROWS_WITH_AS(validate_tree({0, 1}, {{0, 1}, {1, 0}}), doctest::Contains("not a partial order"), FrameError);
    CHECK_THROWS_AS(validate_tree({0, 1, 2}, {{0, 1}}), FrameError);          // two minimal nodes
    CHECK_THROWS_AS(validate_tree({0, 1}, {{0, 5}}), FrameError);              // unknown node
    CHECK_THROWS_AS(validate_tree({0, 0}, {}), FrameError);                    // duplicate id
    CHECK_THROWS_AS(validate_tree({0, 1}, {{0, 1}}, 1), FrameError);           // wrong declared root
}

TEST_CASE("transitive closure of the given pairs")
{
    const Frame f = validate_tree({10, 20, 30}, {{10, 20}, {20, 30}});
    CHECK(f.le(f.index_of(10), f.index_of(30)));
    CHECK(f.cone(f.index_of(20)) == ids_to_set(f, {20, 30}));
    CHECK(f.past(f.index_of(30)) == ids_to_set(f, {10, 20, 30}));
}

TEST_CASE("upsets")
{
    const Frame fork = star(2);
    for (NodeIndex e : members_of(fork.end_nodes())) {
        CHECK(upsets(fork, e).size() == 2);
    }
    CHECK(upsets(fork, fork.root()).size() == 5);
    const Frame c2 = chain(2);
    CHECK(upsets(c2, c2.root()).size() == 3);

    for (const Frame& f : enumerate_trees(5)) {
        for (NodeIndex v = 0; v < f.size(); ++v) {
            auto lib = upsets(f, v);
            auto ref = oracle::upsets(f, v);
            std::sort(lib.begin(), lib.end());
            std::sort(ref.begin(), ref.end());
            CHECK(lib == ref);
            for (NodeSet u : lib) {
                CHECK(is_upset(f, u));
            }
        }
    }
}

TEST_CASE("minimal nodes of an upset")
{
    const Frame f = frame_from_parents({-1, 0, 0, 1, 1});
    const NodeSet u = ids_to_set(f, {2, 3, 4});
    const auto mins = minimal_nodes(f, u);
    CHECK(mins.size() == 3);
    CHECK(minimal_nodes(f, f.cone(f.index_of(1))).size() == 1);
    CHECK(minimal_nodes(f, 0).empty());
}

TEST_CASE("node signatures")
{
    const Frame fork = star(2);
    const NodeIndex r = fork.root();
    CHECK(node_signature(fork, r).upset_count == 5);
    CHECK(node_signature(fork, r).ends == fork.end_nodes());
    for (NodeIndex e : members_of(fork.end_nodes())) {
        CHECK(node_signature(fork, e).upset_count == 2);
        CHECK(node_signature(fork, e).ends == node_bit(e));
    }
    const Frame c3 = chain(3);
    std::vector<std::size_t> counts;
    for (NodeIndex v : c3.cone_preorder(c3.root())) {
        counts.push_back(node_signature(c3, v).upset_count);
    }
    CHECK(counts == std::vector<std::size_t>{4, 3, 2});
    for (const Frame& f : enumerate_trees(6)) {
        CHECK(signature_injective(f));
    }
}

TEST_CASE("tree enumeration")
{
    const std::vector<std::size_t> sizes{1, 1, 2, 4, 9, 20};
    const auto trees = enumerate_trees(6);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto count = static_cast<std::size_t>(
            std::count_if(trees.begin(), trees.end(), [&](const Frame& f) { return f.size() == n; }));
        CHECK(count == sizes[n - 1]);
        if (n <= 5) {
            CHECK(count == oracle::tree_count(n));
        }
    }
    CHECK(enumerate_trees(1).size() == 1);
    CHECK(enumerate_trees(3).size() == 4);
    CHECK(enumerate_trees(4).size() == 8);
    std::set<std::string> codes;
    for (const Frame& f : trees) {
        codes.insert(canonical_code(f));
        CHECK(canonical_code(frame_from_code(canonical_code(f))) == canonical_code(f));
    }
    CHECK(codes.size() == trees.size());
}

TEST_CASE("frame classes")
{
    const auto linear = enumerate_class(FrameClass::linear(), 3);
    REQUIRE(linear.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(linear[i].size() == i + 1);
        CHECK(FrameClass::linear().contains(linear[i]));
    }
    const auto split = enumerate_class(FrameClass::splitting(2), 2);
    REQUIRE(split.size() == 2);
    CHECK(split[0].size() == 1);
    CHECK(canonical_code(split[1]) == canonical_code(star(2)));
    const auto deeper = enumerate_class(FrameClass::splitting(2), 3);
    CHECK(std::any_of(deeper.begin(), deeper.end(), [](const Frame& f) { return f.size() == 7; }));
    for (const Frame& f : enumerate_class(FrameClass::depth_at_most(1), 5)) {
        CHECK(f.size() == 1);
    }
    for (const Frame& f : enumerate_class(FrameClass::depth_at_most(2), 5)) {
        CHECK(f.depth() <= 2);
    }
    CHECK(parse_frame_class("splitting:2").n == 2);
    CHECK(parse_frame_class("depth(3)").kind == FrameClass::Kind::depth);
    CHECK_THROWS(parse_frame_class("wide"));
}

TEST_CASE("preorder keeps sub-cones contiguous")
{
    for (const Frame& f : enumerate_trees(6)) {
        const auto& order = f.cone_preorder(f.root());
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto size = static_cast<std::size_t>(node_count(f.cone(order[i])));
            NodeSet block = 0;
            for (std::size_t j = i; j < i + size; ++j) {
                block |= node_bit(order[j]);
            }
            CHECK(block == f.cone(order[i]));
        }
    }
}

}

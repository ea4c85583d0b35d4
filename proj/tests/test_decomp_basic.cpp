#include <set>

#include "doctest.h"
#include "pcd/decomp_basic.hpp"
#include "pcd/generators.hpp"
#include "pcd/oracle.hpp"

using namespace pcd;

namespace {
MultiGraph bowtie() { return MultiGraph(5, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}}); }
}  // namespace

TEST_CASE("euler_split") {
    MultiGraph tri(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(euler_split(tri).size() == 1);
    CHECK(euler_split(bowtie()).size() == 2);
    auto k5 = complete_graph(5);
    auto cyc = euler_split(k5);
    CHECK(cyc.size() <= 3);
    Decomposition d{cyc, {}};
    CHECK(verify_decomposition(k5, d).valid);
    CHECK_THROWS_AS(euler_split(complete_graph(4)), std::invalid_argument);
}

TEST_CASE("cycle_through_edge") {
    auto bt = bowtie();
    auto c = cycle_through_edge(bt, 0);
    CHECK(c.length() == 3);
    std::set<EdgeId> es(c.edges.begin(), c.edges.end());
    CHECK(es == std::set<EdgeId>{0, 1, 2});
    auto k5 = complete_graph(5);
    auto w = cycle_through_edge(k5, 0);
    CHECK(check_walk(k5, w).empty());
    CHECK(std::count(w.edges.begin(), w.edges.end(), 0) == 1);
    CHECK_THROWS_AS(cycle_through_edge(complete_graph(4), 0), std::invalid_argument);
}

TEST_CASE("greedy decomposition") {
    auto r4 = greedy_path_cycle_decomposition(complete_graph(4));
    auto v4 = verify_decomposition(complete_graph(4), r4.decomposition);
    CHECK(v4.valid);
    CHECK(v4.paths == 2);
    CHECK(v4.cycles == 0);
    auto k5 = complete_graph(5);
    auto r5 = greedy_path_cycle_decomposition(k5);
    auto v5 = verify_decomposition(k5, r5.decomposition);
    CHECK(v5.paths == 0);
    CHECK(v5.cycles <= 3);
    CHECK(greedy_path_cycle_decomposition(MultiGraph(4, {})).decomposition.parts.empty());

    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        auto g = gnp(2 + t % 11, Rational(1 + t % 3, 4), rng);
        auto r = greedy_path_cycle_decomposition(g);
        auto v = verify_decomposition(g, r.decomposition);
        REQUIRE(v.valid);
        CHECK(v.paths == static_cast<int>(degree_stats(g).odd.size()) / 2);
    }
}

TEST_CASE("vizing examples") {
    MultiGraph mt(6, {{0, 1}, {2, 3}, {4, 5}});
    CHECK(vizing_color(mt).palette == 1);
    auto c5 = cycle_graph(5);
    CHECK(chromatic_index_bruteforce(c5) == 3);
    auto col = vizing_color(c5);
    CHECK(is_proper_coloring(c5, col));
    CHECK(col.palette == 3);
    CHECK(chromatic_index_bruteforce(complete_graph(4)) == 3);
    auto k4 = vizing_color(complete_graph(4));
    CHECK(is_proper_coloring(complete_graph(4), k4));
    CHECK(k4.palette <= 4);
}

TEST_CASE("vizing property: simple and multigraphs") {
    Rng rng(2024);
    for (int t = 0; t < 300; ++t) {
        auto g = gnp(2 + static_cast<int>(rng.below(11)), Rational(1 + static_cast<int>(rng.below(3)), 3), rng);
        auto c = vizing_color(g);
        REQUIRE(is_proper_coloring(g, c));
        CHECK(c.palette <= degree_stats(g).max_degree + 1);
    }
    for (int t = 0; t < 100; ++t) {
        int n = 3 + static_cast<int>(rng.below(7));
        auto g = random_multigraph(n, static_cast<int>(rng.below(3 * n)) + 1, 3, rng);
        auto c = vizing_color(g);
        REQUIRE(is_proper_coloring(g, c));
        CHECK(c.palette <= degree_stats(g).max_degree + g.max_multiplicity());
    }
}

TEST_CASE("even matching decomposition") {
    MultiGraph two(4, {{0, 1}, {2, 3}});
    auto b = even_matching_decomposition(two);
    CHECK(b.even_matchings.size() == 1);
    CHECK(b.short_parts.empty());
    MultiGraph p2(3, {{0, 1}, {1, 2}});
    auto b2 = even_matching_decomposition(p2);
    CHECK(b2.even_matchings.empty());
    CHECK(b2.short_parts.size() == 1);
    auto k4 = complete_graph(4);
    auto b4 = even_matching_decomposition(k4);
    CHECK(check_matching_bundle(k4, b4).empty());
    CHECK(b4.matching_cap == 6);
    CHECK(b4.short_cap == 2);
    CHECK_THROWS_AS(even_matching_decomposition(cycle_graph(3)), std::invalid_argument);
    MultiGraph dbl(2, {{0, 1}, {0, 1}});
    auto bd = even_matching_decomposition(dbl);
    REQUIRE(bd.short_parts.size() == 1);
    CHECK(bd.short_parts[0].kind == WalkKind::Cycle);
}

TEST_CASE("vertex-disjoint pair from odd classes") {
    // ab=0, ac=1, de=2, fg=3 on vertices a..g = 0..6
    MultiGraph g(7, {{0, 1}, {0, 2}, {3, 4}, {5, 6}});
    auto [ei, ej] = vertex_disjoint_pair_from_odd_classes(g, {0}, {1, 2, 3});
    CHECK(ei == 0);
    CHECK((ej == 2 || ej == 3));
    CHECK_THROWS(vertex_disjoint_pair_from_odd_classes(g, {0}, {2}));
}

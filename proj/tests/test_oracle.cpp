#include "doctest.h"
#include "pcd/generators.hpp"
#include "pcd/oracle.hpp"

using namespace pcd;

TEST_CASE("oracle examples") {
    MultiGraph tri(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(min_path_cycle_count(tri).count == 1);
    CHECK(min_path_cycle_count(complete_graph(4)).count == 2);
    CHECK(min_path_cycle_count(complete_graph(5)).count == 2);
    CHECK(min_cycle_count(complete_graph(5)).count == 2);
    MultiGraph bowtie(5, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}});
    CHECK(min_cycle_count(bowtie).count == 2);
    CHECK(min_cycle_count(cycle_graph(6)).count == 1);
    CHECK(min_path_count(MultiGraph(2, {{0, 1}})).count == 1);
    CHECK(min_path_count(complete_graph(4)).count == 2);
    CHECK(min_path_count(tri).count == 2);
}

TEST_CASE("oracle preconditions") {
    CHECK_THROWS_AS(min_cycle_count(complete_graph(4)), std::invalid_argument);
    CHECK_THROWS_AS(min_path_count(MultiGraph(4, {{0, 1}, {2, 3}})), std::invalid_argument);
    CHECK_THROWS_AS(min_path_cycle_count(complete_graph(7)), std::invalid_argument);
}

TEST_CASE("oracle witness verifies and matches count") {
    Rng rng(9);
    for (int t = 0; t < 60; ++t) {
        auto g = gnp(6, Rational(1, 2), rng);
        auto r = min_path_cycle_count(g);
        auto v = verify_decomposition(g, r.witness);
        REQUIRE(v.valid);
        CHECK(v.paths + v.cycles == r.count);
        CHECK(v.leftover == 0);
        CHECK(r.count >= static_cast<int>(degree_stats(g).odd.size()) / 2);
    }
}

TEST_CASE("isomorph-free enumeration counts") {
    // OEIS A000088
    const int expect[] = {1, 1, 2, 4, 11, 34, 156};
    for (int n = 0; n <= 6; ++n) CHECK(static_cast<int>(nonisomorphic_graphs(n).size()) == expect[n]);
}

TEST_CASE("chromatic index brute force") {
    CHECK(chromatic_index_bruteforce(cycle_graph(4)) == 2);
    CHECK(chromatic_index_bruteforce(complete_graph(5)) == 5);
}

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "pcd/generators.hpp"
#include "pcd/hamdecomp.hpp"

using namespace pcd;

namespace {

BipartitePair complete_pair(int m) {
    std::vector<std::pair<int, int>> es;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) es.emplace_back(a, b);
    return BipartitePair::from_local(m, m, es);
}

bool single_cycle(const std::vector<int>& perm) {
    int x = 0, len = 0;
    do {
        x = perm[x];
        ++len;
    } while (x != 0);
    return len == static_cast<int>(perm.size());
}

}  // namespace

TEST_CASE("bipartite_hamilton on complete and cycle pairs") {
    Rng rng(1);
    for (int m = 1; m <= 10; ++m) {
        if (m == 1) continue;
        auto p = complete_pair(m);
        auto c = bipartite_hamilton(p, rng);
        CHECK(check_pair_cycle(p, c, true) == "");
    }
    for (int m : {8, 12}) {
        std::vector<std::pair<int, int>> es;
        for (int j = 0; j < m; ++j) {
            es.emplace_back(j, j);
            es.emplace_back((j + 1) % m, j);
        }
        auto p = BipartitePair::from_local(m, m, es);
        auto c = bipartite_hamilton(p, rng);
        CHECK(check_pair_cycle(p, c, true) == "");
        CHECK(c.edges.size() == static_cast<size_t>(2 * m));
    }
}

TEST_CASE("bipartite_hamilton proves absence on two disjoint 4-cycles") {
    std::vector<std::pair<int, int>> es{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 2}, {3, 2}, {3, 3}, {2, 3}};
    auto p = BipartitePair::from_local(4, 4, es);
    Rng rng(3);
    CHECK_THROWS_AS(bipartite_hamilton(p, rng), OperationalError);
}

TEST_CASE("bipartite_hamilton success rate on dense random pairs") {
    Rng rng(11);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        auto p = BipartitePair::from_local(16, 16, random_bipartite(16, 16, Rational(3, 5), rng));
        try {
            auto c = bipartite_hamilton(p, rng);
            if (check_pair_cycle(p, c, true).empty()) ++ok;
        } catch (const OperationalError&) {
        }
    }
    CHECK(ok >= 99);
}

TEST_CASE("perfect matching and Hall violator") {
    auto p = complete_pair(5);
    auto pm = bipartite_perfect_matching(p);
    CHECK(pm.perfect);
    std::set<int> bs(pm.mate_a.begin(), pm.mate_a.end());
    CHECK(bs.size() == 5u);

    auto q = BipartitePair::from_local(4, 4, {{0, 0}, {1, 0}, {2, 1}, {3, 2}, {3, 3}});
    auto qm = bipartite_perfect_matching(q);
    CHECK_FALSE(qm.perfect);
    CHECK(qm.hall_neighbours.size() < qm.hall_violator.size());

    // isolated A vertex
    auto iso = BipartitePair::from_local(3, 3, {{1, 0}, {1, 1}, {2, 2}, {2, 0}});
    auto im = bipartite_perfect_matching(iso);
    CHECK_FALSE(im.perfect);
    CHECK(im.hall_violator.size() > im.hall_neighbours.size());
}

TEST_CASE("regular pairs split into perfect matchings") {
    Rng rng(5);
    auto p = BipartitePair::from_local(10, 10, random_regular_bipartite(10, 3, rng));
    auto mts = regular_bipartite_matching_decomposition(p);
    REQUIRE(mts.size() == 3u);
    std::vector<int> seen(p.edge_ids().size(), 0);
    for (const auto& mt : mts) {
        CHECK(mt.size() == 10u);
        std::set<int> as, bs;
        for (int q : mt) {
            ++seen[q];
            as.insert(p.local_edges()[q].first);
            bs.insert(p.local_edges()[q].second);
        }
        CHECK(as.size() == 10u);
        CHECK(bs.size() == 10u);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    auto k6 = regular_bipartite_matching_decomposition(complete_pair(6));
    CHECK(k6.size() == 6u);
    auto bad = BipartitePair::from_local(2, 2, {{0, 0}, {0, 1}, {1, 1}});
    CHECK_THROWS_AS(regular_bipartite_matching_decomposition(bad), std::invalid_argument);
}

TEST_CASE("closing matchings agrees with brute force on every closing pair of K_{3,3}") {
    // V1 = 0..2, V2 = 3..5, V3 = 6..8; chains are fixed, closing pair runs over all edge subsets.
    std::vector<std::vector<int>> perms;
    std::vector<int> id{0, 1, 2};
    do perms.push_back(id);
    while (std::next_permutation(id.begin(), id.end()));
    int checked = 0, closable = 0;
    for (const auto& s1 : perms)
        for (const auto& s2 : {perms[0], perms[3]})
            for (int mask = 0; mask < (1 << 9); ++mask) {
                std::vector<std::pair<int, int>> es;
                for (int x = 0; x < 3; ++x) es.emplace_back(x, 3 + s1[x]);
                for (int y = 0; y < 3; ++y) es.emplace_back(3 + y, 6 + s2[y]);
                std::vector<std::pair<int, int>> closing;
                for (int b = 0; b < 9; ++b)
                    if (mask >> b & 1) closing.emplace_back(6 + b / 3, b % 3);
                es.insert(es.end(), closing.begin(), closing.end());
                MultiGraph g(9, es);
                MatchingChain chain;
                chain.clusters = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
                chain.matchings = {{0, 1, 2}, {3, 4, 5}};
                std::vector<char> alive(g.m(), 0);
                for (int e = 6; e < g.m(); ++e) alive[e] = 1;
                auto p = BipartitePair::from_graph(g, {6, 7, 8}, {0, 1, 2}, &alive);
                // brute force over all 6 matchings of the closing pair
                bool exists = false;
                for (const auto& mk : perms) {
                    bool inside = true;
                    for (int y = 0; y < 3; ++y) inside = inside && (mask >> (3 * y + mk[y]) & 1);
                    if (!inside) continue;
                    std::vector<int> pi(3);
                    for (int x = 0; x < 3; ++x) pi[x] = mk[s2[s1[x]]];
                    exists = exists || single_cycle(pi);
                }
                bool got = false;
                try {
                    auto r = close_matchings_to_hamilton(g, chain, p);
                    CHECK(check_walk(g, r.cycle) == "");
                    CHECK(r.cycle.length() == 9);
                    std::set<Vertex> vs(r.cycle.vertices.begin(), r.cycle.vertices.end());
                    CHECK(vs.size() == 9u);
                    size_t swaps = r.cycle_counts.size() - (r.exhaustive ? 1 : 0);
                    for (size_t i = 1; i < swaps; ++i)
                        CHECK(r.cycle_counts[i] == r.cycle_counts[i - 1] - 1);
                    got = true;
                } catch (const OperationalError&) {
                }
                CHECK(got == exists);
                ++checked;
                closable += exists;
            }
    CHECK(checked == 6 * 2 * 512);
    CHECK(closable > 0);
}

TEST_CASE("complete closing pair of K_{3,3} always closes") {
    std::vector<std::pair<int, int>> es{{0, 3}, {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}};
    for (int y = 6; y < 9; ++y)
        for (int x = 0; x < 3; ++x) es.emplace_back(y, x);
    MultiGraph g(9, es);
    MatchingChain chain{{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, {{0, 1, 2}, {3, 4, 5}}};
    auto p = BipartitePair::from_graph(g, {6, 7, 8}, {0, 1, 2});
    auto r = close_matchings_to_hamilton(g, chain, p);
    CHECK(r.cycle_counts.back() == 1);
    CHECK(r.matching.size() == 3u);
    MatchingChain broken = chain;
    broken.matchings[0].pop_back();
    CHECK_THROWS_AS(close_matchings_to_hamilton(g, broken, p), std::invalid_argument);
}

TEST_CASE("K_{8,8} decomposes into Hamilton cycles") {
    Rng rng(8);
    auto p = complete_pair(8);
    auto res = hamilton_packing(p, Rational(0), Rational(1), rng);
    CHECK(res.covers_all_edges);
    CHECK(res.cycles.size() == 4u);
    CHECK(res.target == 4);
    std::set<EdgeId> all;
    for (const auto& c : res.cycles) {
        CHECK(check_pair_cycle(p, c, true) == "");
        all.insert(c.edges.begin(), c.edges.end());
    }
    CHECK(all.size() == 64u);
}

TEST_CASE("packing a dense random regular pair meets its target") {
    Rng rng(21);
    auto p = BipartitePair::from_local(16, 16, random_regular_bipartite(16, 8, rng));
    auto res = hamilton_packing(p, Rational(1, 100), Rational(1, 2), rng);
    CHECK(static_cast<int>(res.cycles.size()) >= res.target);
    std::set<EdgeId> all;
    for (const auto& c : res.cycles) {
        CHECK(check_pair_cycle(p, c, true) == "");
        for (EdgeId e : c.edges) CHECK(all.insert(e).second);
    }
}

TEST_CASE("disjoint cycles through the clusters of a complete blow-up") {
    // k = 3, m = 5, complete pairs
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) es.emplace_back(i * 5 + a, ((i + 1) % 3) * 5 + b);
    MultiGraph g(15, es);
    std::vector<std::vector<Vertex>> cl{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}};
    for (int t : {0, 2, 5}) {
        auto cs = disjoint_cycles_through_clusters(g, cl, t);
        CHECK(static_cast<int>(cs.size()) == t);
        std::set<Vertex> used;
        for (const auto& c : cs) {
            CHECK(check_walk(g, c) == "");
            CHECK(c.length() == 3);
            for (size_t i = 0; i + 1 < c.vertices.size(); ++i) CHECK(used.insert(c.vertices[i]).second);
        }
    }
    CHECK_THROWS_AS(disjoint_cycles_through_clusters(g, cl, 6), std::invalid_argument);
}

TEST_CASE("parity surgery evens every degree") {
    Rng rng(4);
    auto p = BipartitePair::from_local(8, 8, random_regular_bipartite(8, 3, rng));
    auto removed = parity_surgery(p, rng);
    std::set<EdgeId> rm(removed.begin(), removed.end());
    std::vector<int> keep;
    for (int q = 0; q < static_cast<int>(p.edge_ids().size()); ++q)
        if (!rm.count(p.edge_ids()[q])) keep.push_back(q);
    auto h = p.with_edges(keep);
    for (int a = 0; a < 8; ++a) {
        CHECK(h.degA(a) % 2 == 0);
        CHECK(h.degB(a) % 2 == 0);
    }
    auto even = BipartitePair::from_local(8, 8, random_regular_bipartite(8, 4, rng));
    CHECK(parity_surgery(even, rng).empty());
}

TEST_CASE("approx_decompose_blowup end to end at k = 4, m = 12") {
    Rng rng(2024);
    auto inst = blowup_cycle(4, 12, Rational(1, 2), rng);
    auto res = approx_decompose_blowup(inst.g, inst.part, 2, rng);
    CHECK(verify_approx_decomposition(inst.g, inst.part, res) == "");
    CHECK(res.h == 4);
    CHECK(res.cycles.size() == 4u);
    CHECK_THROWS_AS(approx_decompose_blowup(inst.g, inst.part, 3, rng), std::invalid_argument);

    // tampering is detected
    auto bad = res;
    std::swap(bad.H.front(), bad.cycles.front().edges.front());
    CHECK(verify_approx_decomposition(inst.g, inst.part, bad) != "");
}

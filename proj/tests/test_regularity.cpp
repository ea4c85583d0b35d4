#include <doctest.h>

#include <set>

#include "pcd/generators.hpp"
#include "pcd/regularity.hpp"

using namespace pcd;

namespace {

BipartitePair complete_pair(int m) {
    std::vector<std::pair<int, int>> es;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) es.emplace_back(a, b);
    return BipartitePair::from_local(m, m, es);
}

BipartitePair matching_pair(int m) {
    std::vector<std::pair<int, int>> es;
    for (int a = 0; a < m; ++a) es.emplace_back(a, a);
    return BipartitePair::from_local(m, m, es);
}

// Direct check of the definition over all subset pairs (small pairs only).
bool brute_regular(const BipartitePair& p, const Rational& eps) {
    int mA = p.mA(), mB = p.mB();
    Rational d = density(p);
    for (std::uint32_t S = 1; S < (1u << mA); ++S) {
        int sa = __builtin_popcount(S);
        if (Rational(sa) < eps * mA) continue;
        for (std::uint32_t T = 1; T < (1u << mB); ++T) {
            int tb = __builtin_popcount(T);
            if (Rational(tb) < eps * mB) continue;
            std::int64_t e = 0;
            for (auto [a, b] : p.local_edges()) e += (S >> a & 1) && (T >> b & 1);
            Rational dd(e, static_cast<std::int64_t>(sa) * tb);
            Rational gap = dd > d ? dd - d : d - dd;
            if (gap >= eps) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("density examples") {
    CHECK(density(complete_pair(3)) == Rational(1));
    CHECK(density(BipartitePair::from_local(3, 3, {})) == Rational(0));
    auto c6 = BipartitePair::from_local(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}});
    CHECK(density(c6) == Rational(2, 3));
}

TEST_CASE("test_regular examples") {
    auto full = test_regular(complete_pair(6), Rational(1, 10));
    CHECK(full.regular);
    CHECK(full.density == Rational(1));

    auto pm = matching_pair(4);
    auto r = test_regular(pm, Rational(1, 4), RegMode::Exhaustive);
    CHECK_FALSE(r.regular);
    REQUIRE(r.witness);
    CHECK(witness_violates(pm, *r.witness, Rational(1, 4)));

    auto two = BipartitePair::from_local(4, 4, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}});
    auto r2 = test_regular(two, Rational(1, 2), RegMode::Exhaustive);
    CHECK_FALSE(r2.regular);
    REQUIRE(r2.witness);
    CHECK(witness_violates(two, *r2.witness, Rational(1, 2)));

    CHECK_THROWS_AS(test_regular(pm, Rational(0)), std::invalid_argument);
}

TEST_CASE("exhaustive regularity agrees with subset enumeration") {
    Rng rng(21);
    const Rational epss[] = {Rational(1, 5), Rational(1, 3), Rational(1, 2)};
    int irregular = 0;
    for (int t = 0; t < 120; ++t) {
        int mA = 2 + static_cast<int>(rng.below(5)), mB = 2 + static_cast<int>(rng.below(5));
        auto p = BipartitePair::from_local(mA, mB, random_bipartite(mA, mB, Rational(1 + t % 4, 5), rng));
        Rational eps = epss[t % 3];
        auto r = test_regular(p, eps, RegMode::Exhaustive);
        CHECK(r.regular == brute_regular(p, eps));
        CHECK(r.regular != r.witness.has_value());
        if (r.witness) CHECK(witness_violates(p, *r.witness, eps));
        irregular += !r.regular;
    }
    CHECK(irregular > 10);
}

TEST_CASE("sub-pairs of regular pairs stay regular") {
    Rng rng(22);
    Rational eps(1, 3), eta(2, 3);
    int checked = 0;
    for (int t = 0; t < 400 && checked < 40; ++t) {
        auto p = BipartitePair::from_local(6, 6, random_bipartite(6, 6, Rational(4, 5), rng));
        auto r = test_regular(p, eps, RegMode::Exhaustive);
        if (!r.regular) continue;
        for (int s = 0; s < 4; ++s) {
            std::vector<int> a{0, 1, 2, 3, 4, 5}, b{0, 1, 2, 3, 4, 5};
            rng.shuffle(a);
            rng.shuffle(b);
            a.resize(4 + rng.below(3));
            b.resize(4 + rng.below(3));
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            auto sub = p.induced(a, b);
            auto rs = test_regular(sub, std::min(Rational(1), eps / eta), RegMode::Exhaustive);
            CHECK(rs.regular);
            CHECK(rs.density >= r.density - eps);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("sampled mode on large pairs") {
    Rng rng(23);
    auto p = BipartitePair::from_local(20, 20, random_bipartite(20, 20, Rational(1, 2), rng));
    auto r = test_regular(p, Rational(1, 2));
    CHECK(r.mode == RegMode::Sampled);
    CHECK(r.regular);
    CHECK(r.samples == kSampleCount);
    // at eps = 1/4 the densest 5 x 5 corner is already too dense
    auto q = test_regular(p, Rational(1, 4));
    CHECK_FALSE(q.regular);
    REQUIRE(q.witness);
    CHECK(witness_violates(p, *q.witness, Rational(1, 4)));
    CHECK(q.witness->density == test_regular(p, Rational(1, 4), RegMode::Auto, 1).witness->density);
    std::vector<std::pair<int, int>> blocks;
    for (int a = 0; a < 20; ++a)
        for (int b = 0; b < 20; ++b)
            if ((a < 10) == (b < 10)) blocks.emplace_back(a, b);
    auto bp = BipartitePair::from_local(20, 20, blocks);
    auto split = test_regular(bp, Rational(1, 4));
    CHECK_FALSE(split.regular);
    REQUIRE(split.witness);
    CHECK(witness_violates(bp, *split.witness, Rational(1, 4)));
}

TEST_CASE("co-degree certificate") {
    CHECK(certify_regular_codegree(complete_pair(10), Rational(1, 10)).certified);
    auto pm = certify_regular_codegree(matching_pair(8), Rational(1, 10));
    CHECK_FALSE(pm.precondition);
    CHECK_FALSE(pm.certified);
    Rng rng(24);
    int pass = 0;
    for (int t = 0; t < 100; ++t) {
        auto p = BipartitePair::from_local(40, 40, random_bipartite(40, 40, Rational(1, 2), rng));
        pass += certify_regular_codegree(p, Rational(1, 5)).certified;
    }
    CHECK(pass >= 95);
}

TEST_CASE("superregularity examples") {
    CHECK(check_superregular(complete_pair(6), Rational(1, 10), Rational(1)).ok);
    std::vector<std::pair<int, int>> es;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            if (a != b) es.emplace_back(a, b);
    auto minus = BipartitePair::from_local(6, 6, es);
    // two matched pairs span a 2x2 sub-pair of density 1/2, so eps = 1/5 is violated
    auto at5 = check_superregular(minus, Rational(1, 5), Rational(5, 6), RegMode::Exhaustive);
    CHECK(at5.degrees_ok);
    CHECK_FALSE(at5.ok);
    REQUIRE(at5.regularity.witness);
    CHECK(at5.regularity.witness->density == Rational(1, 2));
    CHECK(check_superregular(minus, Rational(1, 2), Rational(5, 6), RegMode::Exhaustive).ok);
    std::vector<std::pair<int, int>> star;
    for (int b = 0; b < 6; ++b) star.emplace_back(0, b);
    auto s = check_superregular(BipartitePair::from_local(6, 6, star), Rational(1, 10), Rational(1, 6));
    CHECK_FALSE(s.ok);
    CHECK_FALSE(s.degrees_ok);
    auto tiny = check_superregular(complete_pair(3), Rational(1, 10), Rational(1));
    CHECK(tiny.vacuous);
    CHECK(check_superregular_at_least(complete_pair(6), Rational(1, 10), Rational(1, 2)).ok);
}

TEST_CASE("sparse superregular flags") {
    auto empty = check_sparse_superregular(BipartitePair::from_local(5, 5, {}), Rational(1, 10), Rational(0),
                                           Rational(1, 5), Rational(1, 2));
    CHECK(empty.reg2);
    CHECK(empty.reg3);
    CHECK_FALSE(empty.reg4);
    int m = 8;
    auto pm = check_sparse_superregular(matching_pair(m), Rational(1, 10), Rational(1, m), Rational(1, m), Rational(2, m));
    CHECK(pm.reg2);
    CHECK(pm.reg3);
    CHECK(pm.reg4);
    auto full = check_sparse_superregular(complete_pair(6), Rational(1, 10), Rational(1), Rational(1, 2), Rational(1, 2));
    CHECK_FALSE(full.reg3);
}

TEST_CASE("partition check") {
    auto g = complete_bipartite(5, 5);
    ClusterPartition part;
    part.clusters = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
    derive_support(g, part);
    CHECK(check_superregular_partition(g, part, Rational(1, 10), Rational(1), true).ok());
    auto es = g.edge_list();
    es.emplace_back(0, 1);
    MultiGraph g2(10, es);
    auto rep = check_superregular_partition(g2, part, Rational(1, 10), Rational(1), true);
    CHECK_FALSE(rep.srp[2].ok);

    Rng rng(25);
    auto inst = blowup_cycle(4, 30, Rational(1, 2), rng);
    CHECK(check_superregular_partition(inst.g, inst.part, Rational(1, 3), Rational(1, 2), true, inst.reduced).ok());
    // a random 15-regular pair on 30 + 30 has an explicit 1/4 witness
    auto q = check_superregular_partition(inst.g, inst.part, Rational(1, 4), Rational(1, 2), true, inst.reduced);
    CHECK_FALSE(q.ok());
    auto pair = BipartitePair::from_graph(inst.g, inst.part.clusters[0], inst.part.clusters[1]);
    auto w = test_regular(pair, Rational(1, 4));
    REQUIRE(w.witness);
    CHECK(witness_violates(pair, *w.witness, Rational(1, 4)));
}

TEST_CASE("root_floor and sqrt_floor") {
    CHECK(root_floor(Rational(1, 4), 2) == Rational(1, 2));
    CHECK(root_floor(Rational(1), 7) == Rational(1));
    auto r = root_floor(Rational(1, 100), 12);
    // r^12 <= 1/100 < (r + 10^-6)^12
    double x = static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
    CHECK(std::pow(x, 12) <= 0.01 + 1e-12);
    CHECK(std::pow(x + 1e-6, 12) > 0.01 - 1e-12);
    CHECK(root_floor(Rational(1, 100), 73) > Rational(9, 10));
    CHECK(sqrt_floor(Rational(1, 4)) == Rational(1, 2));
    CHECK_THROWS_AS(root_floor(Rational(0), 2), std::invalid_argument);
    CHECK_THROWS_AS(root_floor(Rational(1, 2), 0), std::invalid_argument);
}

TEST_CASE("split_edges") {
    Rng rng(26);
    auto p = complete_pair(30);
    auto s = split_edges(p, Rational(1, 10), {Rational(1, 2), Rational(1, 2)}, rng);
    REQUIRE(s.slices.size() == 3u);
    CHECK(s.slices[0].empty());
    std::vector<int> seen(p.e(), 0);
    for (const auto& sl : s.slices)
        for (int i : sl) ++seen[i];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    for (int j = 1; j <= 2; ++j) {
        Rational dj = density(p.with_edges(s.slices[j]));
        CHECK(dj > Rational(2, 5));
        CHECK(dj < Rational(3, 5));
    }
    auto one = split_edges(p, Rational(1, 10), {Rational(1)}, rng);
    CHECK(one.slices[0].empty());
    CHECK(static_cast<std::int64_t>(one.slices[1].size()) == p.e());
    CHECK_THROWS_AS(split_edges(p, Rational(1, 10), {Rational(3, 2)}, rng), std::invalid_argument);

    Rng a(9), b(9);
    CHECK(split_edges(p, Rational(1, 10), {Rational(1, 3)}, a).slices ==
          split_edges(p, Rational(1, 10), {Rational(1, 3)}, b).slices);
}

TEST_CASE("split_vertices") {
    Rng rng(27);
    auto full = split_vertices(complete_pair(8), 2, Rational(1, 10), Rational(1), Rational(1, 10), rng);
    REQUIRE(full.A_parts.size() == 2u);
    CHECK(full.A_parts[0].size() == 4u);
    CHECK(full.B_parts[1].size() == 4u);
    auto p = BipartitePair::from_local(40, 40, random_regular_bipartite(40, 20, rng));
    auto vs = split_vertices(p, 2, Rational(1, 100), Rational(1, 2), Rational(1, 4), rng);
    CHECK(vs.eps_checked == root_floor(Rational(1, 100), 7));
    CHECK_THROWS_AS(split_vertices(complete_pair(4), 5, Rational(1, 10), Rational(1), Rational(1, 10), rng),
                    std::invalid_argument);
}

TEST_CASE("orient_balanced") {
    Rng rng(28);
    auto p = complete_pair(20);
    auto o = orient_balanced(p, Rational(1, 10), Rational(1), rng);
    std::int64_t fwd = std::count(o.orientation.forward.begin(), o.orientation.forward.end(), 1);
    CHECK(fwd > 160);
    CHECK(fwd < 240);
    CHECK(o.ab.ok);
    CHECK(o.ba.ok);
    auto single = orient_balanced(BipartitePair::from_local(1, 1, {{0, 0}}), Rational(1, 10), Rational(1), rng);
    CHECK(single.orientation.forward.size() == 1u);
    CHECK(single.ab.ok == false);
    CHECK_THROWS_AS(orient_balanced(matching_pair(6), Rational(1, 10), Rational(1), rng), std::invalid_argument);
}

TEST_CASE("sparse_slice") {
    Rng rng(29);
    auto p = complete_pair(40);
    auto same = sparse_slice(p, Rational(1, 100), Rational(1), Rational(1), rng);
    CHECK(static_cast<std::int64_t>(same.kept.size()) == p.e());
    auto s = sparse_slice(p, Rational(1, 100), Rational(1), Rational(1, 5), rng);
    CHECK(s.flags.all());
    auto sub = p.with_edges(s.kept);
    auto again = check_sparse_superregular(sub, root_floor(Rational(1, 100), 12), Rational(1, 5), Rational(1, 10),
                                           Rational(3, 10));
    CHECK(again.all());
    CHECK(Rational(sub.max_degree()) <= Rational(3, 10) * 40);
    CHECK(Rational(sub.min_degree()) >= Rational(1, 10) * 40);
    CHECK_THROWS_AS(sparse_slice(p, Rational(1, 100), Rational(1, 2), Rational(3, 4), rng), std::invalid_argument);
    CHECK_THROWS_AS(sparse_slice(p, Rational(1, 100), Rational(1, 2), Rational(0), rng), std::invalid_argument);
}

TEST_CASE("stability after removal") {
    auto p = complete_pair(20);
    CHECK(stability_check_removal(p, p, Rational(1, 20), Rational(1), Rational(1, 20)).verdict == StabilityVerdict::Holds);

    auto g = complete_bipartite(20, 20);
    std::vector<Vertex> A, B, A2, B2;
    for (int i = 0; i < 20; ++i) A.push_back(i), B.push_back(20 + i);
    A2.assign(A.begin() + 1, A.end());
    B2.assign(B.begin() + 1, B.end());
    auto before = BipartitePair::from_graph(g, A, B);
    auto after = BipartitePair::from_graph(g, A2, B2);
    CHECK(stability_check_removal(before, after, Rational(1, 20), Rational(1), Rational(1, 20)).verdict ==
          StabilityVerdict::Holds);

    std::vector<char> alive(g.m(), 1);
    for (EdgeId e = 0; e < g.m(); ++e)
        if (g.edge(e).u == 0 || g.edge(e).v == 0) alive[e] = 0;
    auto stripped = BipartitePair::from_graph(g, A, B, &alive);
    CHECK(stability_check_removal(before, stripped, Rational(1, 20), Rational(1), Rational(1, 20)).verdict ==
          StabilityVerdict::PreconditionViolated);
}

TEST_CASE("removing few edges per vertex keeps sparse flags") {
    Rng rng(30);
    Rational eps12 = root_floor(Rational(1, 100), 12);
    for (int m : {24, 40}) {
        auto p = complete_pair(m);
        auto s = sparse_slice(p, Rational(1, 100), Rational(1), Rational(1, 4), rng);
        REQUIRE(s.flags.all());
        // drop a matching: at most one edge, i.e. d'm with d' = 1/m, per vertex
        std::vector<char> hitA(m, 0), hitB(m, 0);
        std::vector<int> keep;
        for (int i : s.kept) {
            auto [a, b] = p.local_edges()[i];
            if (!hitA[a] && !hitB[b] && rng.below(2)) {
                hitA[a] = hitB[b] = 1;
                continue;
            }
            keep.push_back(i);
        }
        auto f = check_sparse_superregular(p.with_edges(keep), std::min(Rational(1), 2 * eps12), Rational(1, 4),
                                           Rational(1, 8) - Rational(1, m), Rational(3, 8));
        CHECK(f.all());
    }
}

#include <doctest.h>

#include <set>

#include "pcd/generators.hpp"
#include "pcd/pipeline.hpp"

using namespace pcd;

namespace {

// Minimum of e(A,B) - p|A||B| over bipartitions with both sides >= eps n, by direct enumeration.
std::optional<Rational> brute_min_slack(const MultiGraph& g, const Rational& eps, const Rational& p) {
    int n = g.n();
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& e : g.edges())
        if (e.u != e.v) {
            adj[e.u] |= 1u << e.v;
            adj[e.v] |= 1u << e.u;
        }
    std::int64_t lo = ceil_of(eps * Rational(n));
    std::optional<Rational> best;
    std::uint32_t full = (1u << n) - 1;
    for (std::uint32_t A = 1; A < full; ++A) {
        std::int64_t a = __builtin_popcount(A);
        if (a < lo || n - a < lo) continue;
        std::int64_t cross = 0;
        for (int x = 0; x < n; ++x)
            if (A >> x & 1) cross += __builtin_popcount(adj[x] & ~A & full);
        Rational s = Rational(cross) - p * Rational(a * (n - a));
        if (!best || s < *best) best = s;
    }
    return best;
}

std::vector<char> mask_of(const MultiGraph& g, const std::vector<EdgeId>& ids) {
    std::vector<char> m(g.m(), 0);
    for (EdgeId e : ids) m[e] = 1;
    return m;
}

struct MainSetup {
    PipelineInstance inst;
    GammaSelection sel;
    std::vector<char> todo;
};

MainSetup main_setup(int m, int v0, std::uint64_t seed, const PipelineConfig& cfg) {
    Rng rng(seed);
    MainSetup s{pipeline_instance(4, m, Rational(1, 2), v0, 6, rng), {}, {}};
    s.sel = select_gamma(s.inst.g, s.inst.part, cfg);
    std::set<Vertex> v0set(s.inst.part.V0.begin(), s.inst.part.V0.end());
    s.todo.assign(s.inst.g.m(), 0);
    for (EdgeId e = 0; e < s.inst.g.m(); ++e) {
        const auto& ed = s.inst.g.edge(e);
        s.todo[e] = !s.sel.gamma[e] && !s.sel.gamma_prime[e] && !(v0set.count(ed.u) && v0set.count(ed.v));
    }
    return s;
}

}  // namespace

TEST_CASE("weak quasirandomness on cliques and two cliques") {
    auto k = complete_graph(10);
    auto r = weak_quasirandom_test(k, Rational(1, 5), Rational(1, 2));
    CHECK(r.exhaustive);
    CHECK(r.quasirandom);
    CHECK(r.checked == (1 << 9) - 1);

    auto tc = two_cliques(6, 1, 1);
    auto q = weak_quasirandom_test(tc, Rational(1, 5), Rational(1, 4));
    REQUIRE_FALSE(q.quasirandom);
    REQUIRE(q.witness);
    std::set<Vertex> A(q.witness->A.begin(), q.witness->A.end());
    bool first = std::set<Vertex>{0, 1, 2, 3, 4, 5} == A, second = std::set<Vertex>{6, 7, 8, 9, 10, 11} == A;
    CHECK((first || second));
    CHECK(q.witness->crossing == 1);
    CHECK(Rational(q.witness->crossing) < q.witness->required);

    CHECK_THROWS_AS(weak_quasirandom_test(k, Rational(0), Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("exhaustive quasirandomness agrees with direct cut enumeration") {
    Rng rng(12);
    const Rational ps[] = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};
    int disagreements = 0;
    for (int t = 0; t < 100; ++t) {
        int n = 4 + static_cast<int>(rng.below(13));
        Rational dens = ps[rng.below(3)];
        auto g = gnp(n, dens, rng);
        Rational eps(1, 2 + static_cast<int>(rng.below(4)));
        Rational p = dens * Rational(1 + static_cast<int>(rng.below(3)), 4);
        auto r = weak_quasirandom_test(g, eps, p, QuasiMode::Exhaustive);
        auto best = brute_min_slack(g, eps, p);
        bool brute_ok = !best || *best >= 0;
        if (r.quasirandom != brute_ok) ++disagreements;
        if (!r.quasirandom) {
            REQUIRE(r.witness);
            auto s = Rational(r.witness->crossing) - r.witness->required;
            CHECK(s == *best);
            std::set<Vertex> all(r.witness->A.begin(), r.witness->A.end());
            all.insert(r.witness->B.begin(), r.witness->B.end());
            CHECK(static_cast<int>(all.size()) == n);
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("sampled quasirandomness finds the planted cut") {
    auto tc = two_cliques(15, 1, 1);
    auto q = weak_quasirandom_test(tc, Rational(1, 5), Rational(1, 4), QuasiMode::Sampled, 3);
    CHECK_FALSE(q.exhaustive);
    CHECK_FALSE(q.quasirandom);
}

TEST_CASE("select_gamma takes whole matchings per pair") {
    Rng rng(2);
    auto inst = pipeline_instance(4, 12, Rational(1, 2), 0, 0, rng);
    PipelineConfig cfg;
    cfg.gamma_matchings = 4;
    auto sel = select_gamma(inst.g, inst.part, cfg);
    auto cl = cluster_index(inst.part, inst.g.n());
    for (Vertex x = 0; x < inst.g.n(); ++x) {
        std::map<int, int> dg, dp;
        for (EdgeId e : inst.g.incident(x)) {
            int c = cl[inst.g.edge(e).other(x)];
            dg[c] += sel.gamma[e];
            dp[c] += sel.gamma_prime[e];
        }
        for (auto [c, d] : dg) CHECK(d == cfg.gamma_matchings);
        for (auto [c, d] : dp) CHECK(d == cfg.gamma_prime_matchings);
    }
    for (EdgeId e = 0; e < inst.g.m(); ++e) CHECK_FALSE((sel.gamma[e] && sel.gamma_prime[e]));
    cfg.gamma_matchings = 6;
    CHECK_THROWS_AS(select_gamma(inst.g, inst.part, cfg), std::invalid_argument);
}

TEST_CASE("pipeline_instance gives exceptional vertices even degree") {
    for (int v0 : {0, 1, 2, 3, 4}) {
        Rng rng(5 + v0);
        auto inst = pipeline_instance(4, 12, Rational(1, 2), v0, 5, rng);
        CHECK(static_cast<int>(inst.part.V0.size()) == v0);
        CHECK(check_partition(inst.part, inst.g.n()).empty());
        for (Vertex x : inst.part.V0) CHECK(inst.g.degree(x) % 2 == 0);
    }
}

TEST_CASE("cover_exceptional closes the edges inside V0") {
    PipelineConfig cfg;
    for (int v0 : {2, 3, 5}) {
        auto s = main_setup(24, v0, 40 + v0, cfg);
        auto ex = cover_exceptional(s.inst.g, s.inst.part, s.sel.gamma, s.todo, cfg);
        std::set<Vertex> V0(s.inst.part.V0.begin(), s.inst.part.V0.end());
        std::vector<int> seen(s.inst.g.m(), 0);
        for (const auto& c : ex.cycles) {
            CHECK(c.kind == WalkKind::Cycle);
            CHECK(check_walk(s.inst.g, c).empty());
            for (EdgeId e : c.edges) ++seen[e];
        }
        for (EdgeId e : ex.leftover) ++seen[e];
        for (EdgeId e = 0; e < s.inst.g.m(); ++e) {
            CHECK(seen[e] <= 1);
            const auto& ed = s.inst.g.edge(e);
            if (V0.count(ed.u) && V0.count(ed.v)) CHECK(seen[e] == 1);
            if (seen[e] && !(V0.count(ed.u) && V0.count(ed.v)))
                CHECK((s.sel.gamma[e] || std::count(ex.extension_edges.begin(), ex.extension_edges.end(), e)));
        }
        CHECK(ex.leftover.empty());
        auto rc = recount_budget(ex.budget.caps(), cluster_index(s.inst.part, s.inst.g.n()), ex.trace);
        CHECK(rc.same_counters(ex.budget));
        CHECK(ex.budget.within_caps());
    }
    cfg.gamma_matchings = 4;
    auto s = main_setup(12, 0, 3, cfg);
    auto ex = cover_exceptional(s.inst.g, s.inst.part, s.sel.gamma, s.todo, cfg);
    CHECK(ex.cycles.empty());
    CHECK(ex.leftover.empty());
}

TEST_CASE("main step covers everything outside Gamma by cycles") {
    PipelineConfig cfg;
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        int v0 = static_cast<int>(seed % 3);
        auto s = main_setup(24, v0, seed, cfg);
        auto ex = cover_exceptional(s.inst.g, s.inst.part, s.sel.gamma, s.todo, cfg);
        for (EdgeId e : ex.extension_edges) s.todo[e] = 0;
        Rng rng(seed);
        auto r = main_step_cycles(s.inst.g, s.inst.part, s.todo, ex.gamma_residual, s.sel.gamma_prime, MainMode::Cycles,
                                  {}, cfg, rng);
        Decomposition d;
        d.parts = ex.cycles;
        d.parts.insert(d.parts.end(), r.parts.begin(), r.parts.end());
        d.leftover = ex.leftover;
        d.leftover.insert(d.leftover.end(), r.leftover.begin(), r.leftover.end());
        for (EdgeId e = 0; e < s.inst.g.m(); ++e)
            if (r.gamma_residual[e]) d.leftover.push_back(e);
        bool ok = verify_decomposition(s.inst.g, d).valid;
        for (const auto& w : d.parts) ok = ok && w.kind == WalkKind::Cycle;
        std::int64_t covered = static_cast<std::int64_t>(d.leftover.size());
        for (const auto& w : d.parts) covered += w.length();
        ok = ok && covered == s.inst.g.m();
        ok = ok && r.leftover.empty() && r.recert.ok() && r.within_budget;
        auto rc = recount_budget(r.budget.caps(), cluster_index(s.inst.part, s.inst.g.n()), r.trace);
        ok = ok && rc.same_counters(r.budget) && r.budget.within_caps();
        good += ok;
    }
    CHECK(good >= 18);
}

TEST_CASE("main step in path mode prescribes the odd endpoints") {
    PipelineConfig cfg;
    auto s = main_setup(24, 0, 9, cfg);
    std::vector<Vertex> U{s.inst.part.clusters[0][0], s.inst.part.clusters[2][5]};
    Rng rng(9);
    auto r = main_step_cycles(s.inst.g, s.inst.part, s.todo, s.sel.gamma, s.sel.gamma_prime, MainMode::Paths, U, cfg, rng);
    CHECK(r.parity_exact);
    CHECK(r.fictive.edges.size() == 1);
    CHECK(r.fictive.incidence[U[0]] == 1);
    Decomposition d;
    d.parts = r.parts;
    for (const auto& w : r.parts) CHECK(w.kind == WalkKind::Path);
    d.leftover = r.leftover;
    for (EdgeId e = 0; e < s.inst.g.m(); ++e)
        if (r.gamma_residual[e]) d.leftover.push_back(e);
    CHECK(verify_decomposition(s.inst.g, d).valid);
    int ends_u = 0;
    for (const auto& w : r.parts) ends_u += (w.front() == U[0]) + (w.back() == U[0]);
    CHECK(ends_u % 2 == 1);

    CHECK_THROWS_AS(main_step_cycles(s.inst.g, s.inst.part, s.todo, s.sel.gamma, s.sel.gamma_prime, MainMode::Paths,
                                     {U[0]}, cfg, rng),
                    std::invalid_argument);
}

TEST_CASE("main step rejects bad inputs") {
    PipelineConfig cfg;
    cfg.gamma_matchings = 4;
    auto s = main_setup(12, 2, 4, cfg);
    Rng rng(1);
    // Gamma restricted to two pairs disconnects the reduced graph
    auto cl = cluster_index(s.inst.part, s.inst.g.n());
    auto split = s.sel.gamma;
    for (EdgeId e = 0; e < s.inst.g.m(); ++e) {
        int a = cl[s.inst.g.edge(e).u], b = cl[s.inst.g.edge(e).v];
        if (std::min(a, b) == 1 && std::max(a, b) == 2) split[e] = 0;
        if (std::min(a, b) == 0 && std::max(a, b) == 3) split[e] = 0;
    }
    auto todo = s.todo;
    for (EdgeId e = 0; e < s.inst.g.m(); ++e)
        if (s.sel.gamma[e] && !split[e]) todo[e] = 1;
    std::set<Vertex> V0(s.inst.part.V0.begin(), s.inst.part.V0.end());
    for (EdgeId e = 0; e < s.inst.g.m(); ++e)
        if (V0.count(s.inst.g.edge(e).u) && V0.count(s.inst.g.edge(e).v)) todo[e] = 0;
    CHECK_THROWS_AS(main_step_cycles(s.inst.g, s.inst.part, todo, split, s.sel.gamma_prime, MainMode::Cycles, {}, cfg, rng),
                    std::invalid_argument);
    // an edge inside V0 left in todo
    auto inside = s.todo;
    for (EdgeId e = 0; e < s.inst.g.m(); ++e)
        if (V0.count(s.inst.g.edge(e).u) && V0.count(s.inst.g.edge(e).v)) inside[e] = 1;
    CHECK_THROWS_AS(main_step_cycles(s.inst.g, s.inst.part, inside, s.sel.gamma, s.sel.gamma_prime, MainMode::Cycles, {},
                                     cfg, rng),
                    std::invalid_argument);
    // overlapping masks
    CHECK_THROWS_AS(main_step_cycles(s.inst.g, s.inst.part, s.sel.gamma, s.sel.gamma, s.sel.gamma_prime, MainMode::Cycles,
                                     {}, cfg, rng),
                    std::invalid_argument);
}

TEST_CASE("decompose strategies on small complete graphs") {
    for (int n : {4, 5, 6}) {
        auto g = complete_graph(n);
        for (auto st : {Strategy::GreedyBasic, Strategy::EulerianiseThenCycles}) {
            auto r = decompose(g, st, Rational(1, 10), 7);
            CHECK(r.verified);
            CHECK(r.conservation);
            REQUIRE(r.report.oracle_min);
            CHECK(*r.report.oracle_min <= r.report.paths + r.report.cycles);
            CHECK(*r.report.oracle_min <= n / 2);
        }
    }
    auto k5 = decompose(complete_graph(5), Strategy::EulerianiseThenCycles, Rational(1, 10), 1);
    CHECK(k5.report.paths == 0);
    REQUIRE(k5.report.oracle_min_cycles);
    CHECK(*k5.report.oracle_min_cycles == 2);
    CHECK_THROWS_AS(decompose(complete_graph(5), Strategy::FullPipeline, Rational(1, 10), 1), std::invalid_argument);
    CHECK(parse_strategy(to_string(Strategy::FullPipeline)) == Strategy::FullPipeline);
    CHECK_THROWS_AS(parse_strategy("nope"), std::invalid_argument);
}

TEST_CASE("full pipeline on a blow-up with exceptional vertices") {
    Rng rng(11);
    auto inst = pipeline_instance(4, 24, Rational(1, 2), 2, 6, rng);
    auto r = decompose(inst.g, Strategy::FullPipeline, Rational(1, 10), 11, &inst.part);
    CHECK(r.verified);
    CHECK(r.conservation);
    CHECK(r.decomposition.leftover.empty());
    CHECK_FALSE(r.report.oracle_min);
    bool lovasz = false;
    for (const auto& t : r.report.targets)
        if (t.name == "lovasz") lovasz = t.applies;
    CHECK(lovasz);
}

TEST_CASE("bound report targets") {
    auto g = complete_graph(5);
    Decomposition d;
    d.parts.push_back(walk_from_edges(g, WalkKind::Cycle, 0, {0, 4, 7, 9, 3}));
    auto r0 = bound_report(g, d, Rational(1, 10), false);
    CHECK(r0.cycles == 1);
    CHECK_FALSE(r0.oracle_min);
    std::map<std::string, BoundTarget> t;
    for (const auto& x : r0.targets) t[x.name] = x;
    CHECK(t["lovasz"].value == Rational(2));
    CHECK(t["hajos"].value == Rational(2));
    CHECK(t["gallai"].value == Rational(3));
    CHECK_FALSE(t["gallai"].applies);
    CHECK(t["paths_or_cycles"].value == Rational(5, 2) + Rational(1, 2));
    CHECK(t["degree_bound"].value == Rational(2) + Rational(1, 2));
}

TEST_CASE("counterexample families exceed their targets") {
    auto a = audit_counterexamples();
    REQUIRE(a.size() == 3);
    // goldens from the exact oracle
    CHECK(a[0].measure == "cycles");
    CHECK(a[0].n == 10);
    CHECK(a[0].m == 22);
    CHECK(a[0].target == Rational(3));
    CHECK(a[0].oracle_min == 5);
    CHECK(a[1].measure == "cycles");
    CHECK(a[1].n == 9);
    CHECK(a[1].m == 16);
    CHECK(a[1].target == Rational(3));
    CHECK(a[1].oracle_min == 4);
    CHECK(a[2].measure == "paths");
    CHECK(a[2].n == 8);
    CHECK(a[2].odd == 4);
    CHECK(a[2].target == Rational(3));
    CHECK(a[2].oracle_min == 4);
    for (const auto& e : a) CHECK(e.exceeds);
}

#include "pcd/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "pcd/decomp_basic.hpp"
#include "pcd/generators.hpp"
#include "pcd/hamdecomp.hpp"
#include "pcd/oracle.hpp"
#include "pcd/regularise.hpp"

namespace pcd {

// ---------------------------------------------------------------- quasirandomness

namespace {

struct CutSearch {
    const MultiGraph& g;
    Rational eps, p;
    std::vector<std::vector<std::int64_t>> w;  // multiplicities
    int n;
    std::int64_t lo;  // minimum side size

    CutSearch(const MultiGraph& g_, const Rational& eps_, const Rational& p_) : g(g_), eps(eps_), p(p_), n(g_.n()) {
        w.assign(n, std::vector<std::int64_t>(n, 0));
        for (const auto& e : g.edges())
            if (e.u != e.v) {
                ++w[e.u][e.v];
                ++w[e.v][e.u];
            }
        lo = ceil_of(eps * Rational(n));
    }
    // slack = e(A,B) - p|A||B|
    Rational slack(std::int64_t cross, std::int64_t a) const { return Rational(cross) - p * Rational(a * (n - a)); }
    bool sizes_ok(std::int64_t a) const { return a >= lo && n - a >= lo && a > 0 && a < n; }

    QuasiWitness witness(const std::vector<char>& inA, std::int64_t cross) const {
        QuasiWitness q;
        for (Vertex x = 0; x < n; ++x) (inA[x] ? q.A : q.B).push_back(x);
        q.crossing = cross;
        q.required = p * Rational(static_cast<std::int64_t>(q.A.size() * q.B.size()));
        return q;
    }
};

}  // namespace

QuasiResult weak_quasirandom_test(const MultiGraph& g, const Rational& eps, const Rational& p, QuasiMode mode,
                                  std::uint64_t seed) {
    if (eps <= 0 || eps > Rational(1, 2)) throw std::invalid_argument("weak_quasirandom_test: eps must lie in (0, 1/2]");
    QuasiResult res;
    int n = g.n();
    if (n < 2) return res;
    CutSearch cs(g, eps, p);
    bool exhaustive = mode == QuasiMode::Exhaustive || (mode == QuasiMode::Auto && n <= kQuasiExhaustiveCap);
    if (exhaustive && n > 30) throw std::invalid_argument("weak_quasirandom_test: exhaustive mode needs n <= 30");
    res.exhaustive = exhaustive;
    std::optional<Rational> best;
    std::vector<char> best_side;
    std::int64_t best_cross = 0;
    auto consider = [&](const std::vector<char>& inA, std::int64_t a, std::int64_t cross) {
        ++res.checked;
        if (!cs.sizes_ok(a)) return;
        Rational s = cs.slack(cross, a);
        if (s < 0 && (!best || s < *best)) {
            best = s;
            best_side = inA;
            best_cross = cross;
        }
    };
    if (exhaustive) {
        // Gray code over the first n-1 vertices; vertex n-1 stays in B.
        std::vector<char> inA(n, 0);
        std::int64_t cross = 0, a = 0;
        std::uint64_t total = std::uint64_t{1} << (n - 1);
        for (std::uint64_t i = 1; i < total; ++i) {
            int v = __builtin_ctzll(i);
            std::int64_t toA = 0, toB = 0;
            for (Vertex u = 0; u < n; ++u) {
                if (u == v) continue;
                (inA[u] ? toA : toB) += cs.w[v][u];
            }
            if (inA[v]) {
                cross += toA - toB;
                inA[v] = 0;
                --a;
            } else {
                cross += toB - toA;
                inA[v] = 1;
                ++a;
            }
            consider(inA, a, cross);
        }
    } else {
        Rng rng(seed);
        for (int t = 0; t < kSampleCount; ++t) {
            std::vector<char> inA(n, 0);
            std::int64_t a = 0;
            for (Vertex x = 0; x < n; ++x)
                if (rng.below(2)) inA[x] = 1, ++a;
            auto cross_of = [&] {
                std::int64_t c = 0;
                for (Vertex x = 0; x < n; ++x)
                    if (inA[x])
                        for (Vertex y = 0; y < n; ++y)
                            if (!inA[y]) c += cs.w[x][y];
                return c;
            };
            std::int64_t cross = cross_of();
            // local search: single-vertex moves that lower the slack
            for (bool moved = true; moved;) {
                moved = false;
                Rational cur = cs.slack(cross, a);
                for (Vertex v = 0; v < n; ++v) {
                    std::int64_t toA = 0, toB = 0;
                    for (Vertex u = 0; u < n; ++u)
                        if (u != v) (inA[u] ? toA : toB) += cs.w[v][u];
                    std::int64_t na = inA[v] ? a - 1 : a + 1;
                    std::int64_t nc = inA[v] ? cross + toA - toB : cross + toB - toA;
                    if (!cs.sizes_ok(na)) continue;
                    if (cs.slack(nc, na) < cur) {
                        inA[v] = !inA[v];
                        a = na;
                        cross = nc;
                        moved = true;
                        break;
                    }
                }
            }
            consider(inA, a, cross);
        }
    }
    if (best) {
        res.quasirandom = false;
        res.witness = cs.witness(best_side, best_cross);
    }
    return res;
}

// ---------------------------------------------------------------- instances and Gamma

GammaSelection select_gamma(const MultiGraph& g, const ClusterPartition& part, const PipelineConfig& cfg) {
    std::string why = check_partition(part, g.n());
    if (!why.empty()) throw std::invalid_argument("select_gamma: " + why);
    GammaSelection sel;
    sel.gamma.assign(g.m(), 0);
    sel.gamma_prime.assign(g.m(), 0);
    auto counts = reduced_counts(g, part);
    int k = part.k(), m = part.m();
    if (m == 0) throw std::invalid_argument("select_gamma: empty clusters");
    sel.gamma_density = Rational(cfg.gamma_matchings, m);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (counts[i][j] == 0) continue;
            auto bp = BipartitePair::from_graph(g, part.clusters[i], part.clusters[j]);
            std::vector<std::vector<int>> pms;
            try {
                pms = regular_bipartite_matching_decomposition(bp);
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument("select_gamma: pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                            ") is not a regular balanced pair");
            }
            int need = cfg.gamma_matchings + cfg.gamma_prime_matchings;
            if (static_cast<int>(pms.size()) < need)
                throw std::invalid_argument("select_gamma: pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                            ") has degree " + std::to_string(pms.size()) + " < " + std::to_string(need));
            for (int t = 0; t < need; ++t)
                for (int pos : pms[t]) (t < cfg.gamma_matchings ? sel.gamma : sel.gamma_prime)[bp.edge_ids()[pos]] = 1;
        }
    return sel;
}

PipelineInstance pipeline_instance(int k, int m, const Rational& d, int v0, int v0_degree, Rng& rng) {
    if (v0 < 0 || v0_degree < 0) throw std::invalid_argument("pipeline_instance: negative size");
    auto base = blowup_cycle(k, m, d, rng);
    int n0 = base.g.n();
    auto es = base.g.edge_list();
    // V0 is a path for v0 = 2 and a cycle for v0 >= 3; the shared neighbourhood keeps V0 degrees even.
    int internal = v0 == 2 ? 1 : (v0 >= 3 ? 2 : 0);
    int s = v0_degree;
    if ((s + internal) % 2) ++s;
    if (v0 > 0 && s > n0) throw std::invalid_argument("pipeline_instance: V0 degree exceeds the cluster vertices");
    std::vector<Vertex> all(n0);
    std::iota(all.begin(), all.end(), 0);
    auto S = rng.sample(all, static_cast<size_t>(s));
    std::sort(S.begin(), S.end());
    for (int x = 0; x < v0; ++x)
        for (Vertex c : S) es.emplace_back(n0 + x, c);
    if (v0 == 2) es.emplace_back(n0, n0 + 1);
    if (v0 >= 3)
        for (int x = 0; x < v0; ++x) es.emplace_back(n0 + x, n0 + (x + 1) % v0);
    PipelineInstance inst;
    inst.g = MultiGraph(n0 + v0, es);
    inst.part = base.part;
    for (int x = 0; x < v0; ++x) inst.part.V0.push_back(n0 + x);
    inst.pair_degree = base.pair_degree;
    return inst;
}

// ---------------------------------------------------------------- shared helpers

namespace {

std::vector<char> v0_mask(const ClusterPartition& part, int n) {
    std::vector<char> in(n, 0);
    for (Vertex x : part.V0) in[x] = 1;
    return in;
}

struct TieState {
    std::vector<char> gamma, gamma_prime;
    TieBudget budget;
    size_t trace_size;
    std::map<std::pair<Vertex, PairKey>, int> gp_use;
    int forest_base;
};

TieState save(const TieContext& ctx) {
    return {ctx.gamma, ctx.gamma_prime, ctx.budget, ctx.trace.size(), ctx.gamma_prime_use, ctx.forest_base};
}

void restore(TieContext& ctx, TieState s) {
    ctx.gamma = std::move(s.gamma);
    ctx.gamma_prime = std::move(s.gamma_prime);
    ctx.budget = std::move(s.budget);
    ctx.trace.resize(s.trace_size);
    ctx.gamma_prime_use = std::move(s.gp_use);
    ctx.forest_base = s.forest_base;
}

// Closes one forest into a single cycle; restores ctx and returns nullopt on failure.
std::optional<Walk> tie_forest(TieContext& ctx, const LinearForest& f, int forest_id, bool many, const Rational& beta,
                               const Rational& zeta, std::vector<EdgeId>* used) {
    auto st = save(ctx);
    ctx.forest_base = forest_id;
    try {
        std::vector<LinearForest> cur{f};
        std::vector<EdgeId> u;
        if (many) {
            auto a = tie_many(ctx, cur, beta, zeta);
            cur = a.forests;
            u.insert(u.end(), a.used[0].begin(), a.used[0].end());
        }
        auto b = tie_few(ctx, cur);
        u.insert(u.end(), b.used[0].begin(), b.used[0].end());
        auto c = close_into_cycles(ctx, b.forests);
        u.insert(u.end(), c.used[0].begin(), c.used[0].end());
        ctx.forest_base = st.forest_base;
        if (used) used->insert(used->end(), u.begin(), u.end());
        return c.cycles.front();
    } catch (const OperationalError&) {
        restore(ctx, std::move(st));
        return std::nullopt;
    }
}

// Pops closed subtrails at repeated vertices; what remains is a path or a cycle without repeats.
std::vector<Walk> split_repeats(const MultiGraph& g, const Walk& w) {
    std::vector<Walk> out;
    std::vector<Vertex> sv{w.vertices.front()};
    std::vector<EdgeId> se;
    std::map<Vertex, size_t> pos{{w.vertices.front(), 0}};
    for (size_t i = 0; i < w.edges.size(); ++i) {
        Vertex v = w.vertices[i + 1];
        se.push_back(w.edges[i]);
        auto it = pos.find(v);
        if (it != pos.end()) {
            size_t p = it->second;
            std::vector<EdgeId> cyc(se.begin() + static_cast<long>(p), se.end());
            out.push_back(walk_from_edges(g, WalkKind::Cycle, v, cyc));
            for (size_t q = p + 1; q < sv.size(); ++q) pos.erase(sv[q]);
            sv.resize(p + 1);
            se.resize(p);
        } else {
            pos[v] = sv.size();
            sv.push_back(v);
        }
    }
    if (!se.empty()) out.push_back(walk_from_edges(g, WalkKind::Path, sv.front(), se));
    return out;
}

// Two paths covering a cycle; used when only paths are wanted.
std::vector<Walk> cut_cycle(const MultiGraph& g, const Walk& c) {
    size_t L = c.edges.size(), h = L / 2;
    std::vector<EdgeId> a(c.edges.begin(), c.edges.begin() + static_cast<long>(h));
    std::vector<EdgeId> b(c.edges.begin() + static_cast<long>(h), c.edges.end());
    std::vector<Walk> out;
    if (!a.empty()) out.push_back(walk_from_edges(g, WalkKind::Path, c.vertices[0], a));
    if (!b.empty()) out.push_back(walk_from_edges(g, WalkKind::Path, c.vertices[h], b));
    return out;
}

// Removes edges with id >= real from a cycle; the remaining segments become paths.
std::vector<Walk> drop_fictive(const MultiGraph& ga, const Walk& c, int real) {
    size_t L = c.edges.size();
    size_t start = L;
    for (size_t i = 0; i < L; ++i)
        if (c.edges[i] >= real) {
            start = i;
            break;
        }
    if (start == L) return {c};
    std::vector<Walk> out;
    std::vector<EdgeId> seg;
    Vertex seg_start = -1;
    for (size_t t = 1; t <= L; ++t) {
        size_t i = (start + t) % L;
        EdgeId e = c.edges[i];
        if (e >= real) {
            if (!seg.empty()) out.push_back(walk_from_edges(ga, WalkKind::Path, seg_start, seg));
            seg.clear();
            continue;
        }
        if (seg.empty()) seg_start = c.vertices[i];
        seg.push_back(e);
    }
    if (!seg.empty()) out.push_back(walk_from_edges(ga, WalkKind::Path, seg_start, seg));
    return out;
}

MultiGraph augmented(const MultiGraph& g, const std::vector<std::pair<Vertex, Vertex>>& extra) {
    auto es = g.edge_list();
    es.insert(es.end(), extra.begin(), extra.end());
    return MultiGraph(g.n(), es);
}

}  // namespace

// ---------------------------------------------------------------- exceptional vertices

ExceptionalCover cover_exceptional(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>& gamma,
                                   const std::vector<char>& available, const PipelineConfig& cfg) {
    auto inV0 = v0_mask(part, g.n());
    for (EdgeId e = 0; e < g.m(); ++e)
        if (gamma[e] && (inV0[g.edge(e).u] || inV0[g.edge(e).v]))
            throw std::invalid_argument("cover_exceptional: Gamma touches V0");
    TieCaps caps = default_caps(cfg.eps, cfg.zeta, part.m());
    TieContext ctx(g, part, gamma, caps);
    ExceptionalCover out;
    std::vector<EdgeId> inside;
    for (EdgeId e = 0; e < g.m(); ++e)
        if (inV0[g.edge(e).u] && inV0[g.edge(e).v]) inside.push_back(e);
    if (!inside.empty()) {
        std::vector<EdgeId> origin;
        MultiGraph h = g.edge_subgraph(inside, &origin);
        auto gd = greedy_path_cycle_decomposition(h).decomposition;
        improve_locally(h, gd);
        std::vector<char> free = available;
        for (EdgeId e : inside) free[e] = 0;
        std::vector<Walk> extended;
        std::vector<std::vector<EdgeId>> core;  // V0 edges per extended path
        for (const auto& w : gd.parts) {
            std::vector<EdgeId> ids;
            for (EdgeId e : w.edges) ids.push_back(origin[e]);
            Walk real = walk_from_edges(g, w.kind, w.front(), ids);
            if (w.kind == WalkKind::Cycle) {
                out.cycles.push_back(real);
                continue;
            }
            ++out.v0_paths;
            std::set<Vertex> on(real.vertices.begin(), real.vertices.end());
            auto leave = [&](Vertex x, Vertex avoid) -> EdgeId {
                for (EdgeId e : g.incident(x)) {
                    Vertex y = g.edge(e).other(x);
                    if (free[e] && !inV0[y] && !on.count(y) && y != avoid) return e;
                }
                return -1;
            };
            EdgeId a = leave(real.front(), -1);
            EdgeId b = a < 0 ? -1 : leave(real.back(), g.edge(a).other(real.front()));
            if (a < 0 || b < 0) {
                out.leftover.insert(out.leftover.end(), ids.begin(), ids.end());
                continue;
            }
            free[a] = free[b] = 0;
            std::vector<EdgeId> es{a};
            es.insert(es.end(), ids.begin(), ids.end());
            es.push_back(b);
            extended.push_back(walk_from_edges(g, WalkKind::Path, g.edge(a).other(real.front()), es));
            core.push_back(ids);
        }
        // vertex-disjoint groups, one cycle each
        std::vector<std::vector<int>> groups;
        std::vector<std::set<Vertex>> used_v;
        for (int i = 0; i < static_cast<int>(extended.size()); ++i) {
            size_t t = 0;
            for (; t < groups.size(); ++t) {
                bool clash = false;
                for (Vertex x : extended[i].vertices) clash = clash || used_v[t].count(x);
                if (!clash) break;
            }
            if (t == groups.size()) {
                groups.emplace_back();
                used_v.emplace_back();
            }
            groups[t].push_back(i);
            used_v[t].insert(extended[i].vertices.begin(), extended[i].vertices.end());
        }
        int fid = 0;
        for (const auto& grp : groups) {
            LinearForest f;
            for (int i : grp) f.paths.push_back(extended[i]);
            ++out.forests;
            if (auto c = tie_forest(ctx, f, fid++, false, cfg.beta, cfg.zeta, &out.gamma_used)) {
                out.cycles.push_back(*c);
                for (int i : grp) {
                    out.extension_edges.push_back(extended[i].edges.front());
                    out.extension_edges.push_back(extended[i].edges.back());
                }
                continue;
            }
            for (int i : grp) {
                LinearForest one{{extended[i]}};
                if (auto c = tie_forest(ctx, one, fid++, false, cfg.beta, cfg.zeta, &out.gamma_used)) {
                    out.cycles.push_back(*c);
                    out.extension_edges.push_back(extended[i].edges.front());
                    out.extension_edges.push_back(extended[i].edges.back());
                } else {
                    out.leftover.insert(out.leftover.end(), core[i].begin(), core[i].end());
                }
            }
        }
    }
    std::sort(out.leftover.begin(), out.leftover.end());
    auto cap = floor_of(Rational(1) / (cfg.beta * cfg.beta));
    if (static_cast<std::int64_t>(out.leftover.size()) > cap)
        throw OperationalError("cover_exceptional", std::to_string(out.leftover.size()) + " edges of G[V0] left, above floor(1/beta^2)");
    out.gamma_residual = ctx.gamma;
    for (EdgeId e = 0; e < g.m(); ++e) out.gamma_residual[e] = out.gamma_residual[e] && gamma[e];
    out.trace = ctx.trace;
    out.budget = ctx.budget;
    return out;
}

// ---------------------------------------------------------------- main step

namespace {

struct Arc {
    Vertex from, to;
    std::vector<EdgeId> edges;
};

// Tail of every active edge under an Euler orientation (odd vertices joined to a dummy vertex first).
std::vector<Vertex> euler_tails(const MultiGraph& ga, std::vector<EdgeId> active, Rng& rng) {
    rng.shuffle(active);
    int n = ga.n();
    std::vector<std::pair<int, int>> es;
    std::vector<int> deg(n, 0);
    for (EdgeId e : active) {
        es.emplace_back(ga.edge(e).u, ga.edge(e).v);
        ++deg[ga.edge(e).u];
        ++deg[ga.edge(e).v];
    }
    for (Vertex x = 0; x < n; ++x)
        if (deg[x] % 2) es.emplace_back(x, n);
    MultiGraph aux(n + 1, es);
    std::vector<Vertex> tail(ga.m(), -1);
    for (const auto& c : euler_split(aux))
        for (size_t i = 0; i < c.edges.size(); ++i)
            if (c.edges[i] < static_cast<EdgeId>(active.size())) tail[active[c.edges[i]]] = c.vertices[i];
    return tail;
}

struct MainAttempt {
    std::vector<Walk> cycles;  // on the augmented graph
    std::vector<EdgeId> leftover;
    int classes = 0, class_cycles = 0, pieces = 0, sparse_cycles = 0;
};

MainAttempt main_attempt(TieContext& ctx, const MultiGraph& ga, const std::vector<char>& inV0,
                         const std::vector<EdgeId>& active, const std::vector<EdgeId>& H, const PipelineConfig& cfg,
                         Rng& rng) {
    MainAttempt out;
    int n = ga.n();
    auto tail = euler_tails(ga, active, rng);
    std::vector<Arc> arcs;
    std::map<Vertex, std::vector<EdgeId>> in0, out0;
    for (EdgeId e : active) {
        Vertex t = tail[e], h = ga.edge(e).other(t);
        if (inV0[h]) in0[h].push_back(e);
        if (inV0[t]) out0[t].push_back(e);
        if (!inV0[t] && !inV0[h]) arcs.push_back({t, h, {e}});
    }
    for (auto& [x, ins] : in0) {
        auto& outs = out0[x];
        if (ins.size() != outs.size()) throw std::logic_error("main_step: unbalanced exceptional vertex");
        rng.shuffle(ins);
        rng.shuffle(outs);
        for (size_t i = 0; i < ins.size(); ++i) {
            Vertex a = tail[ins[i]];
            for (size_t j = i; j < outs.size(); ++j) {
                Vertex b = ga.edge(outs[j]).other(x);
                if (b != a) {
                    std::swap(outs[i], outs[j]);
                    break;
                }
            }
            Vertex b = ga.edge(outs[i]).other(x);
            if (a == b) {
                out.cycles.push_back(walk_from_edges(ga, WalkKind::Cycle, a, {ins[i], outs[i]}));
                ++out.class_cycles;
            } else {
                arcs.push_back({a, b, {ins[i], outs[i]}});
            }
        }
    }
    // Regular bipartite cover: arcs plus padding, self-pairs v+ -> v- first so balanced vertices stay out of a class.
    std::vector<int> dout(n, 0), din(n, 0);
    for (const auto& a : arcs) {
        ++dout[a.from];
        ++din[a.to];
    }
    int D = 0;
    for (Vertex x = 0; x < n; ++x) D = std::max({D, dout[x], din[x]});
    std::vector<std::pair<int, int>> local;
    for (const auto& a : arcs) local.emplace_back(a.from, a.to);
    std::vector<Vertex> left, right;
    for (Vertex x = 0; x < n; ++x) {
        int lo = D - dout[x], ri = D - din[x], both = std::min(lo, ri);
        for (int t = 0; t < both; ++t) local.emplace_back(x, x);
        for (int t = both; t < lo; ++t) left.push_back(x);
        for (int t = both; t < ri; ++t) right.push_back(x);
    }
    for (size_t i = 0; i < left.size(); ++i) local.emplace_back(left[i], right[i]);
    std::vector<std::vector<int>> classes;
    if (D > 0) classes = regular_bipartite_matching_decomposition(BipartitePair::from_local(n, n, local));
    out.classes = static_cast<int>(classes.size());

    int A = static_cast<int>(arcs.size());
    std::int64_t occ_cap = std::max<std::int64_t>(1, floor_of(cfg.zeta * Rational(ctx.part.m())));
    int forest_id = 0;
    for (const auto& cls : classes) {
        std::vector<int> succ(n, -1);
        std::vector<char> has_pred(n, 0);
        for (int pos : cls)
            if (pos < A) {
                succ[arcs[pos].from] = pos;
                has_pred[arcs[pos].to] = 1;
            }
        std::vector<char> seen(A, 0);
        std::vector<Walk> paths;
        auto expand = [&](Vertex start, WalkKind kind) {
            std::vector<EdgeId> es;
            Vertex v = start;
            while (succ[v] >= 0 && !seen[succ[v]]) {
                seen[succ[v]] = 1;
                const Arc& a = arcs[succ[v]];
                es.insert(es.end(), a.edges.begin(), a.edges.end());
                v = a.to;
            }
            for (auto& w : split_repeats(ga, walk_from_edges(ga, WalkKind::Path, start, es))) {
                if (w.kind == WalkKind::Cycle) {
                    out.cycles.push_back(w);
                    ++out.class_cycles;
                } else if (kind == WalkKind::Cycle && w.front() == w.back()) {
                    out.cycles.push_back(walk_from_edges(ga, WalkKind::Cycle, w.front(), w.edges));
                    ++out.class_cycles;
                } else {
                    paths.push_back(w);
                }
            }
        };
        for (Vertex v = 0; v < n; ++v)
            if (succ[v] >= 0 && !has_pred[v]) expand(v, WalkKind::Path);
        for (int pos : cls)
            if (pos < A && !seen[pos]) expand(arcs[pos].from, WalkKind::Cycle);

        // pieces: occupancy at most zeta m per cluster, exceptional vertices at most once
        rng.shuffle(paths);
        std::vector<LinearForest> pieces;
        std::vector<std::vector<std::int64_t>> load;
        std::vector<std::set<Vertex>> verts;
        std::vector<Walk> solo;
        for (const auto& p : paths) {
            std::vector<std::int64_t> need(ctx.part.k(), 0);
            for (Vertex x : p.vertices)
                if (ctx.cluster_of[x] >= 0) ++need[ctx.cluster_of[x]];
            if (*std::max_element(need.begin(), need.end()) > occ_cap) {
                solo.push_back(p);
                continue;
            }
            size_t t = 0;
            for (; t < pieces.size(); ++t) {
                bool ok = true;
                for (int c = 0; c < ctx.part.k() && ok; ++c) ok = load[t][c] + need[c] <= occ_cap;
                for (Vertex x : p.vertices) ok = ok && !verts[t].count(x);
                if (ok) break;
            }
            if (t == pieces.size()) {
                pieces.emplace_back();
                load.emplace_back(ctx.part.k(), 0);
                verts.emplace_back();
            }
            pieces[t].paths.push_back(p);
            for (int c = 0; c < ctx.part.k(); ++c) load[t][c] += need[c];
            verts[t].insert(p.vertices.begin(), p.vertices.end());
        }
        for (const auto& f : pieces) {
            ++out.pieces;
            if (auto c = tie_forest(ctx, f, forest_id++, true, cfg.beta, cfg.zeta, nullptr)) {
                out.cycles.push_back(*c);
                continue;
            }
            for (const auto& p : f.paths) solo.push_back(p);
            --out.pieces;
        }
        for (const auto& p : solo) {
            ++out.pieces;
            auto c = tie_forest(ctx, LinearForest{{p}}, forest_id++, false, cfg.beta, cfg.zeta, nullptr);
            if (!c) throw OperationalError("main_step", "a class path could not be closed through Gamma");
            out.cycles.push_back(*c);
        }
    }
    ctx.forest_base = forest_id;
    if (!H.empty()) {
        auto sc = cover_sparse_leftover(ctx, H, cfg.beta, cfg.zeta, cfg.sparse_dcap, rng);
        out.sparse_cycles = static_cast<int>(sc.cycles.size());
        out.cycles.insert(out.cycles.end(), sc.cycles.begin(), sc.cycles.end());
        out.leftover = sc.leftover;
    }
    ctx.forest_base = 0;
    return out;
}

}  // namespace

MainStepResult main_step_cycles(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>& todo,
                                const std::vector<char>& gamma, const std::vector<char>& gamma_prime, MainMode mode,
                                const std::vector<Vertex>& U, const PipelineConfig& cfg, Rng& rng) {
    int M = g.m();
    if (static_cast<int>(todo.size()) != M || static_cast<int>(gamma.size()) != M ||
        static_cast<int>(gamma_prime.size()) != M)
        throw std::invalid_argument("main_step: mask sizes differ from the edge count");
    std::string why = check_partition(part, g.n());
    if (!why.empty()) throw std::invalid_argument("main_step: " + why);
    auto inV0 = v0_mask(part, g.n());
    for (EdgeId e = 0; e < M; ++e) {
        int owners = (todo[e] != 0) + (gamma[e] != 0) + (gamma_prime[e] != 0);
        if (owners > 1) throw std::invalid_argument("main_step: edge " + std::to_string(e) + " in two of todo, Gamma, Gamma'");
        bool touches = inV0[g.edge(e).u] || inV0[g.edge(e).v];
        if ((gamma[e] || gamma_prime[e]) && touches) throw std::invalid_argument("main_step: Gamma or Gamma' touches V0");
        if (todo[e] && inV0[g.edge(e).u] && inV0[g.edge(e).v])
            throw std::invalid_argument("main_step: edges inside V0 belong to cover_exceptional");
    }
    auto comp = reduced_components(reduced_counts(g, part, &gamma));
    if (std::any_of(comp.begin(), comp.end(), [](int c) { return c != 0; }))
        throw std::invalid_argument("main_step: reduced graph of Gamma is disconnected");
    std::vector<int> tdeg(g.n(), 0);
    for (EdgeId e = 0; e < M; ++e)
        if (todo[e]) {
            ++tdeg[g.edge(e).u];
            ++tdeg[g.edge(e).v];
        }
    for (Vertex x : part.V0)
        if (tdeg[x] % 2) throw std::invalid_argument("main_step: exceptional vertex " + std::to_string(x) + " has odd degree");

    MainStepResult res;
    std::vector<std::pair<Vertex, Vertex>> fict;
    if (mode == MainMode::Paths) {
        if (U.size() % 2) throw std::invalid_argument("main_step: |U| must be even");
        std::set<Vertex> us(U.begin(), U.end());
        if (us.size() != U.size()) throw std::invalid_argument("main_step: U has repeated vertices");
        for (Vertex u : U)
            if (u < 0 || u >= g.n() || inV0[u]) throw std::invalid_argument("main_step: U must lie outside V0");
        for (size_t i = 0; i < U.size(); i += 2) fict.emplace_back(U[i], U[i + 1]);
    } else if (!U.empty()) {
        throw std::invalid_argument("main_step: U is only used in path mode");
    }
    res.fictive.edges = fict;
    res.fictive.incidence.assign(g.n(), 0);
    for (auto [a, b] : fict) {
        ++res.fictive.incidence[a];
        ++res.fictive.incidence[b];
    }
    MultiGraph ga = augmented(g, fict);
    auto extend = [&](const std::vector<char>& m) {
        std::vector<char> x = m;
        x.resize(ga.m(), 0);
        return x;
    };
    std::vector<EdgeId> active, H;
    for (EdgeId e = 0; e < ga.m(); ++e)
        if (e >= M || todo[e]) active.push_back(e);
    for (EdgeId e = 0; e < M; ++e)
        if (gamma_prime[e]) H.push_back(e);

    TieCaps caps = default_caps(cfg.eps, cfg.zeta, part.m());
    res.reservoirs = static_cast<int>(std::max<std::int64_t>(1, floor_of(Rational(1) / cfg.zeta)));
    std::optional<MainAttempt> got;
    std::optional<TieContext> ctx;
    for (int attempt = 1; attempt <= kRetryBudget && !got; ++attempt) {
        res.attempts = attempt;
        ctx.emplace(ga, part, extend(gamma), caps);
        try {
            got = main_attempt(*ctx, ga, inV0, active, H, cfg, rng);
        } catch (const OperationalError& e) {
            res.notes.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
        }
    }
    if (!got)
        throw OperationalError("main_step", "retry budget exhausted; last: " + (res.notes.empty() ? "" : res.notes.back()));

    res.classes = got->classes;
    res.class_cycles = got->class_cycles;
    res.pieces = got->pieces;
    res.sparse_cycles = got->sparse_cycles;
    res.leftover = got->leftover;
    res.trace = ctx->trace;
    res.budget = ctx->budget;
    res.gamma_residual.assign(M, 0);
    for (EdgeId e = 0; e < M; ++e) res.gamma_residual[e] = gamma[e] && ctx->gamma[e];

    if (mode == MainMode::Cycles) {
        res.parts = got->cycles;
    } else {
        for (const auto& c : got->cycles) {
            bool has_f = std::any_of(c.edges.begin(), c.edges.end(), [&](EdgeId e) { return e >= M; });
            auto segs = has_f ? drop_fictive(ga, c, M) : cut_cycle(ga, c);
            res.parts.insert(res.parts.end(), segs.begin(), segs.end());
        }
        res.endpoint_parity.assign(g.n(), 0);
        for (const auto& p : res.parts) {
            res.endpoint_parity[p.front()] ^= 1;
            res.endpoint_parity[p.back()] ^= 1;
        }
        std::set<Vertex> us(U.begin(), U.end());
        for (Vertex x = 0; x < g.n(); ++x) res.parity_exact = res.parity_exact && (res.endpoint_parity[x] == (us.count(x) ? 1 : 0));
    }
    res.cycle_count = static_cast<int>(got->cycles.size());
    res.cycle_budget = Rational(degree_stats(g).max_degree, 2) + 7 * cfg.zeta * Rational(g.n());
    res.within_budget = Rational(res.cycle_count) <= res.cycle_budget;

    res.recert_eps = root_floor(cfg.eps, cfg.recert_root);
    std::vector<std::pair<int, int>> R;
    auto counts = reduced_counts(g, part, &gamma);
    for (int i = 0; i < part.k(); ++i)
        for (int j = i + 1; j < part.k(); ++j)
            if (counts[i][j] > 0) R.emplace_back(i, j);
    Rational dg = Rational(cfg.gamma_matchings, std::max(1, part.m()));
    res.recert = check_superregular_partition(g, part, res.recert_eps, dg, false, R, &res.gamma_residual, 1);
    return res;
}

// ---------------------------------------------------------------- decompose

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::GreedyBasic: return "greedy";
        case Strategy::EulerianiseThenCycles: return "eulerianise";
        case Strategy::FullPipeline: return "full";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "greedy" || s == "GreedyBasic") return Strategy::GreedyBasic;
    if (s == "eulerianise" || s == "EulerianiseThenCycles") return Strategy::EulerianiseThenCycles;
    if (s == "full" || s == "FullPipeline") return Strategy::FullPipeline;
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

BoundReport bound_report(const MultiGraph& g, const Decomposition& d, const Rational& delta, bool consult_oracle) {
    BoundReport r;
    auto ds = degree_stats(g);
    r.n = g.n();
    r.m = g.m();
    r.max_degree = ds.max_degree;
    r.odd = static_cast<int>(ds.odd.size());
    r.delta = delta;
    for (const auto& w : d.parts) (w.kind == WalkKind::Path ? r.paths : r.cycles)++;
    r.leftover = static_cast<int>(d.leftover.size());
    int total = r.paths + r.cycles;
    bool simple = g.max_multiplicity() <= 1;
    bool connected = g.m() > 0 && is_connected(g);
    Rational n(r.n);
    auto add = [&](std::string name, std::string formula, Rational value, int achieved, bool applies) {
        r.targets.push_back({std::move(name), std::move(formula), value, achieved, applies, Rational(achieved) <= value});
    };
    add("lovasz", "floor(n/2)", Rational(r.n / 2), total, simple);
    add("gallai", "ceil(n/2)", Rational((r.n + 1) / 2), r.paths, connected && r.cycles == 0 && simple);
    add("hajos", "floor((n-1)/2)", Rational(std::max(0, (r.n - 1) / 2)), r.cycles, ds.eulerian() && r.paths == 0 && simple);
    add("paths_or_cycles", "n/2 + delta n", n / 2 + delta * n, total, true);
    add("degree_bound", "max(odd/2, Delta/2) + delta n",
        std::max(Rational(r.odd, 2), Rational(r.max_degree, 2)) + delta * n, total, true);
    if (consult_oracle && g.m() <= kOracleEdgeCap) {
        r.oracle_min = g.m() == 0 ? 0 : min_path_cycle_count(g).count;
        if (ds.eulerian()) r.oracle_min_cycles = g.m() == 0 ? 0 : min_cycle_count(g).count;
        if (connected) r.oracle_min_paths = min_path_count(g).count;
    }
    return r;
}

namespace {

// Greedy cover of the listed edges, mapped back to g's ids.
std::vector<Walk> greedy_cover(const MultiGraph& g, const std::vector<EdgeId>& ids) {
    if (ids.empty()) return {};
    std::vector<EdgeId> origin;
    MultiGraph h = g.edge_subgraph(ids, &origin);
    auto d = greedy_path_cycle_decomposition(h).decomposition;
    improve_locally(h, d);
    std::vector<Walk> out;
    for (const auto& w : d.parts) {
        std::vector<EdgeId> es;
        for (EdgeId e : w.edges) es.push_back(origin[e]);
        out.push_back(walk_from_edges(g, w.kind, w.front(), es));
    }
    return out;
}

}  // namespace

DecomposeResult decompose(const MultiGraph& g, Strategy strategy, const Rational& delta, std::uint64_t seed,
                          const ClusterPartition* part, const PipelineConfig& cfg) {
    DecomposeResult res;
    res.strategy = strategy;
    Rng rng(seed);
    switch (strategy) {
        case Strategy::GreedyBasic: {
            res.decomposition = greedy_path_cycle_decomposition(g).decomposition;
            improve_locally(g, res.decomposition);
            break;
        }
        case Strategy::EulerianiseThenCycles: {
            auto eu = eulerianise_graph(g);
            res.decomposition.parts = eu.removed;
            auto cyc = euler_split(g, &eu.alive);
            res.decomposition.parts.insert(res.decomposition.parts.end(), cyc.begin(), cyc.end());
            res.notes.push_back("removed " + std::to_string(eu.removed.size()) + " paths with " +
                                std::to_string(eu.removed_edges) + " edges");
            break;
        }
        case Strategy::FullPipeline: {
            if (!part) throw std::invalid_argument("full pipeline needs a partition (generator-shaped input)");
            auto sel = select_gamma(g, *part, cfg);
            auto inV0 = v0_mask(*part, g.n());
            std::vector<char> todo(g.m(), 0);
            for (EdgeId e = 0; e < g.m(); ++e)
                todo[e] = !sel.gamma[e] && !sel.gamma_prime[e] && !(inV0[g.edge(e).u] && inV0[g.edge(e).v]);
            auto ex = cover_exceptional(g, *part, sel.gamma, todo, cfg);
            for (EdgeId e : ex.extension_edges) todo[e] = 0;
            auto ms = main_step_cycles(g, *part, todo, ex.gamma_residual, sel.gamma_prime, MainMode::Cycles, {}, cfg, rng);
            auto& parts = res.decomposition.parts;
            parts = ex.cycles;
            parts.insert(parts.end(), ms.parts.begin(), ms.parts.end());
            std::vector<EdgeId> rest = ex.leftover;
            rest.insert(rest.end(), ms.leftover.begin(), ms.leftover.end());
            std::vector<EdgeId> tilde;
            for (EdgeId e = 0; e < g.m(); ++e)
                if (ms.gamma_residual[e]) tilde.push_back(e);
            res.notes.push_back("exceptional: " + std::to_string(ex.cycles.size()) + " cycles, " +
                                std::to_string(ex.leftover.size()) + " edges left");
            res.notes.push_back("main step: " + std::to_string(ms.parts.size()) + " cycles over " +
                                std::to_string(ms.classes) + " classes, budget " + to_string(ms.cycle_budget) +
                                (ms.within_budget ? " met" : " exceeded"));
            res.notes.push_back(std::string("Gamma~ re-certified at eps ") + to_string(ms.recert_eps) + ": " +
                                (ms.recert.ok() ? "yes" : "no"));
            bool approx_done = false;
            try {
                std::vector<EdgeId> origin;
                MultiGraph gt = g.edge_subgraph(tilde, &origin);
                auto ad = approx_decompose_blowup(gt, *part, 2, rng);
                for (const auto& c : ad.cycles) {
                    std::vector<EdgeId> es;
                    for (EdgeId e : c.edges) es.push_back(origin[e]);
                    parts.push_back(walk_from_edges(g, WalkKind::Cycle, c.front(), es));
                }
                for (EdgeId e : ad.H) rest.push_back(origin[e]);
                approx_done = true;
                res.notes.push_back("approx_decompose_blowup on Gamma~: " + std::to_string(ad.cycles.size()) + " cycles");
            } catch (const std::exception& e) {
                res.notes.push_back(std::string("approx_decompose_blowup on Gamma~ not applicable: ") + e.what());
            }
            if (!approx_done) rest.insert(rest.end(), tilde.begin(), tilde.end());
            std::sort(rest.begin(), rest.end());
            auto tail = greedy_cover(g, rest);
            parts.insert(parts.end(), tail.begin(), tail.end());
            res.notes.push_back("greedy cover of " + std::to_string(rest.size()) + " remaining edges: " +
                                std::to_string(tail.size()) + " parts");
            break;
        }
    }
    auto vr = verify_decomposition(g, res.decomposition);
    res.verified = vr.valid;
    if (!vr.valid) res.notes.push_back("verification failed: " + vr.violation);
    std::int64_t covered = static_cast<std::int64_t>(res.decomposition.leftover.size());
    for (const auto& w : res.decomposition.parts) covered += w.length();
    res.conservation = covered == g.m();
    res.report = bound_report(g, res.decomposition, delta);
    return res;
}

// ---------------------------------------------------------------- counterexample audit

std::vector<AuditEntry> audit_counterexamples() {
    std::vector<AuditEntry> out;
    auto entry = [&](std::string family, const MultiGraph& g, bool cycles, std::string formula, Rational target) {
        AuditEntry a;
        auto ds = degree_stats(g);
        a.family = std::move(family);
        a.measure = cycles ? "cycles" : "paths";
        a.n = g.n();
        a.m = g.m();
        a.max_degree = ds.max_degree;
        a.odd = static_cast<int>(ds.odd.size());
        a.target_formula = std::move(formula);
        a.target = target;
        a.oracle_min = cycles ? min_cycle_count(g, 24).count : min_path_count(g, 24).count;
        a.exceeds = Rational(a.oracle_min) > target;
        out.push_back(a);
    };
    // two cliques joined by two parallel crossing edges
    auto tc = two_cliques(5, 1, 2);
    entry("two-cliques n=5 s=1 matchings=2", tc, true, "Delta/2", Rational(degree_stats(tc).max_degree, 2));
    // clique with pendant triangles
    auto ct = clique_triangles(5, 2);
    entry("clique-triangles m=5 t=2", ct, true, "Delta/2", Rational(degree_stats(ct).max_degree, 2));
    // clique with a star sharing one leaf
    auto cs = clique_star(5, 3);
    auto ds = degree_stats(cs);
    entry("clique-star m=5 l=3", cs, false, "max(odd/2, ceil((Delta+1)/2))",
          std::max(Rational(static_cast<std::int64_t>(ds.odd.size()), 2), Rational((ds.max_degree + 2) / 2)));
    return out;
}

}  // namespace pcd

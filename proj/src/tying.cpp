#include "pcd/tying.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "pcd/decomp_basic.hpp"

namespace pcd {

namespace {

PairKey key_of(int a, int b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }

int floor_at_one(const Rational& x, const std::string& name, std::vector<std::string>& floors) {
    auto v = floor_of(x);
    if (v < 1) {
        floors.push_back(name + " " + to_string(x) + " -> 1");
        return 1;
    }
    return static_cast<int>(v);
}

// P oriented to end at x, Q oriented to start at y, joined by `link` from x to y.
Walk join(const MultiGraph& g, Walk P, Vertex x, const std::vector<EdgeId>& link, Walk Q, Vertex y) {
    if (P.back() != x) P = reversed(P);
    if (Q.front() != y) Q = reversed(Q);
    std::vector<EdgeId> edges = P.edges;
    edges.insert(edges.end(), link.begin(), link.end());
    edges.insert(edges.end(), Q.edges.begin(), Q.edges.end());
    return walk_from_edges(g, WalkKind::Path, P.front(), edges);
}

void check_forest_input(const MultiGraph& g, const LinearForest& f, size_t i) {
    for (const auto& p : f.paths)
        if (p.kind != WalkKind::Path) throw std::invalid_argument("forest " + std::to_string(i) + " contains a cycle");
    std::string why;
    if (!is_linear_forest(g, f, &why)) throw std::invalid_argument("forest " + std::to_string(i) + ": " + why);
}

std::vector<char> occupied(const MultiGraph& g, const LinearForest& f) {
    std::vector<char> occ(g.n(), 0);
    for (const auto& p : f.paths)
        for (Vertex x : p.vertices) occ[x] = 1;
    return occ;
}

// Forest edges cannot double as link edges.
void reserve_forest_edges(TieContext& ctx, const std::vector<LinearForest>& forests) {
    for (const auto& f : forests)
        for (const auto& p : f.paths)
            for (EdgeId e : p.edges) {
                ctx.gamma[e] = 0;
                if (!ctx.gamma_prime.empty()) ctx.gamma_prime[e] = 0;
            }
}

struct LinkSearch {
    TieContext& ctx;
    int forest;
    std::string stage;
    bool bridges = false;

    bool gp_fits(const std::vector<EdgeId>& edges) const {
        if (!bridges) return true;
        std::map<std::pair<Vertex, PairKey>, int> add;
        for (EdgeId e : edges) {
            if (ctx.gamma[e]) continue;
            const Edge& ed = ctx.g.edge(e);
            PairKey k = key_of(ctx.cluster_of[ed.u], ctx.cluster_of[ed.v]);
            ++add[{ed.u, k}];
            ++add[{ed.v, k}];
        }
        for (const auto& [key, c] : add) {
            auto it = ctx.gamma_prime_use.find(key);
            if ((it == ctx.gamma_prime_use.end() ? 0 : it->second) + c > ctx.gamma_prime_cap) return false;
        }
        return true;
    }

    std::optional<LinkRecord> find(Vertex x, Vertex y, const std::vector<char>& occ,
                                   const std::function<bool(EdgeId)>& edge_ok, int max_len,
                                   const std::function<bool(const LinkRecord&)>& shape_ok = {}) const {
        const MultiGraph& g = ctx.g;
        std::vector<char> alive(g.m(), 0);
        for (EdgeId e = 0; e < g.m(); ++e) {
            bool free = ctx.gamma[e] || (bridges && !ctx.gamma_prime.empty() && ctx.gamma_prime[e]);
            alive[e] = free && edge_ok(e);
        }
        std::vector<char> blocked = occ;
        for (Vertex v = 0; v < g.n(); ++v)
            if (ctx.budget.through(v) >= ctx.budget.caps().internal_per_vertex) blocked[v] = 1;
        auto path = bfs_path(g, x, y, alive, &blocked, max_len);
        if (!path || path->empty()) return std::nullopt;
        Walk w = walk_from_edges(g, WalkKind::Path, x, *path);
        LinkRecord r{ctx.forest_base + forest, stage, w.vertices, w.edges};
        if (shape_ok && !shape_ok(r)) return std::nullopt;
        if (!ctx.budget.fits(r) || !gp_fits(r.edges)) return std::nullopt;
        return r;
    }

    int commit(const LinkRecord& r, std::vector<char>& occ, std::vector<EdgeId>& used) const {
        int bridge = 0;
        for (EdgeId e : r.edges) {
            if (ctx.gamma[e]) {
                ctx.gamma[e] = 0;
            } else {
                ctx.gamma_prime[e] = 0;
                const Edge& ed = ctx.g.edge(e);
                PairKey k = key_of(ctx.cluster_of[ed.u], ctx.cluster_of[ed.v]);
                ++ctx.gamma_prime_use[{ed.u, k}];
                ++ctx.gamma_prime_use[{ed.v, k}];
                ++bridge;
            }
            used.push_back(e);
        }
        for (Vertex v : r.vertices) occ[v] = 1;
        ctx.budget.charge(r);
        ctx.trace.push_back(r);
        return bridge;
    }
};

struct End {
    int path;
    Vertex v;
};

}  // namespace

PairPath short_path_in_pair(const BipartitePair& p, Vertex x, Vertex y, const std::set<Vertex>& forbidden) {
    MultiGraph h = p.to_graph();
    std::map<Vertex, int> local;
    for (int a = 0; a < p.mA(); ++a) local[p.A()[a]] = a;
    for (int b = 0; b < p.mB(); ++b) local[p.B()[b]] = p.mA() + b;
    auto ix = local.find(x), iy = local.find(y);
    if (ix == local.end() || iy == local.end()) throw std::invalid_argument("short_path_in_pair: endpoint outside the pair");
    if (x == y) throw std::invalid_argument("short_path_in_pair: endpoints coincide");
    bool same = (ix->second < p.mA()) == (iy->second < p.mA());
    std::vector<char> blocked(h.n(), 0);
    for (Vertex f : forbidden) {
        auto it = local.find(f);
        if (it != local.end()) blocked[it->second] = 1;
    }
    std::vector<char> alive(h.m(), 1);
    auto path = bfs_path(h, ix->second, iy->second, alive, &blocked, same ? 4 : 3);
    if (!path) throw OperationalError("short_path_in_pair", "no path of admissible length between " + std::to_string(x) +
                                                               " and " + std::to_string(y));
    PairPath out;
    Walk w = walk_from_edges(h, WalkKind::Path, ix->second, *path);
    for (int v : w.vertices) out.vertices.push_back(v < p.mA() ? p.A()[v] : p.B()[v - p.mA()]);
    for (EdgeId e : w.edges) out.edges.push_back(p.edge_ids()[e]);
    return out;
}

TieCaps default_caps(const Rational& eps, const Rational& zeta, int m) {
    TieCaps c;
    c.endpoint_per_pair = floor_at_one(root_floor(eps, 2) * Rational(m), "endpoint_per_pair", c.floors);
    c.internal_per_vertex = floor_at_one(root_floor(eps, 4) * Rational(m), "internal_per_vertex", c.floors);
    c.pair_per_forest = floor_at_one(sqrt_floor(zeta) * Rational(m, 4), "pair_per_forest", c.floors);
    return c;
}

TieBudget::TieBudget(TieCaps caps, std::vector<int> cluster_of) : caps_(std::move(caps)), cluster_(std::move(cluster_of)) {}

void TieBudget::apply(const LinkRecord& r, std::map<std::pair<Vertex, PairKey>, int>& ep, std::map<Vertex, int>& in,
                      std::map<std::pair<PairKey, int>, int>& pf) const {
    size_t L = r.edges.size();
    if (L == 0) return;
    ep[{r.vertices.front(), key_of(cluster_[r.vertices[0]], cluster_[r.vertices[1]])}]++;
    ep[{r.vertices.back(), key_of(cluster_[r.vertices[L - 1]], cluster_[r.vertices[L]])}]++;
    for (size_t i = 1; i < L; ++i) in[r.vertices[i]]++;
    if (r.stage != "tie_many") return;
    std::set<PairKey> pairs;
    for (size_t i = 0; i < L; ++i) pairs.insert(key_of(cluster_[r.vertices[i]], cluster_[r.vertices[i + 1]]));
    for (const auto& k : pairs) pf[{k, r.forest}]++;
}

bool TieBudget::fits(const LinkRecord& r) const {
    std::map<std::pair<Vertex, PairKey>, int> ep;
    std::map<Vertex, int> in;
    std::map<std::pair<PairKey, int>, int> pf;
    apply(r, ep, in, pf);
    auto over = [](const auto& cur, const auto& add, int cap) {
        for (const auto& [k, c] : add) {
            auto it = cur.find(k);
            if ((it == cur.end() ? 0 : it->second) + c > cap) return true;
        }
        return false;
    };
    return !over(endpoint_use, ep, caps_.endpoint_per_pair) && !over(through_use, in, caps_.internal_per_vertex) &&
           !over(pair_forest_use, pf, caps_.pair_per_forest);
}

void TieBudget::charge(const LinkRecord& r) { apply(r, endpoint_use, through_use, pair_forest_use); }

bool TieBudget::within_caps() const {
    for (const auto& [k, c] : endpoint_use)
        if (c > caps_.endpoint_per_pair) return false;
    for (const auto& [k, c] : through_use)
        if (c > caps_.internal_per_vertex) return false;
    for (const auto& [k, c] : pair_forest_use)
        if (c > caps_.pair_per_forest) return false;
    return true;
}

bool TieBudget::same_counters(const TieBudget& o) const {
    return endpoint_use == o.endpoint_use && through_use == o.through_use && pair_forest_use == o.pair_forest_use;
}

int TieBudget::through(Vertex x) const {
    auto it = through_use.find(x);
    return it == through_use.end() ? 0 : it->second;
}

TieBudget recount_budget(const TieCaps& caps, const std::vector<int>& cluster_of, const std::vector<LinkRecord>& trace) {
    TieBudget b(caps, cluster_of);
    for (const auto& r : trace) b.charge(r);
    return b;
}

TieContext::TieContext(const MultiGraph& g_, const ClusterPartition& part_, std::vector<char> gamma_, TieCaps caps,
                       std::vector<char> gamma_prime_)
    : g(g_), part(part_), cluster_of(cluster_index(part_, g_.n())), gamma(std::move(gamma_)),
      gamma_prime(std::move(gamma_prime_)) {
    if (static_cast<int>(gamma.size()) != g.m()) throw std::invalid_argument("gamma mask size differs from edge count");
    if (!gamma_prime.empty() && static_cast<int>(gamma_prime.size()) != g.m())
        throw std::invalid_argument("gamma' mask size differs from edge count");
    budget = TieBudget(std::move(caps), cluster_of);
}

TieResult tie_many(TieContext& ctx, const std::vector<LinearForest>& forests, const Rational& beta, const Rational& zeta) {
    if (beta <= 0 || beta > 1) throw std::invalid_argument("tie_many: beta must lie in (0,1]");
    const MultiGraph& g = ctx.g;
    int k = ctx.part.k(), m = ctx.part.m();
    std::int64_t occ_cap = floor_of(zeta * Rational(m));
    for (size_t i = 0; i < forests.size(); ++i) {
        check_forest_input(g, forests[i], i);
        std::vector<int> per(k, 0);
        for (const auto& p : forests[i].paths)
            for (Vertex x : p.vertices)
                if (ctx.cluster_of[x] >= 0) ++per[ctx.cluster_of[x]];
        for (int j = 0; j < k; ++j)
            if (per[j] > occ_cap)
                throw std::invalid_argument("tie_many: forest " + std::to_string(i) + " occupies " + std::to_string(per[j]) +
                                            " vertices of cluster " + std::to_string(j) + ", above zeta m");
    }
    reserve_forest_edges(ctx, forests);
    int limit = static_cast<int>(floor_of(Rational(2) / (beta * beta)));
    auto counts = reduced_counts(g, ctx.part, &ctx.gamma);

    TieResult res;
    res.forests = forests;
    res.used.assign(forests.size(), {});
    for (size_t i = 0; i < forests.size(); ++i) {
        auto& paths = res.forests[i].paths;
        auto occ = occupied(g, res.forests[i]);
        LinkSearch ls{ctx, static_cast<int>(i), "tie_many"};
        for (int j = 0; j < k; ++j) {
            for (;;) {
                std::vector<End> ends;
                for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
                    if (ctx.cluster_of[paths[p].front()] == j) ends.push_back({p, paths[p].front()});
                    if (ctx.cluster_of[paths[p].back()] == j) ends.push_back({p, paths[p].back()});
                }
                if (static_cast<int>(ends.size()) <= limit) break;
                bool merged = false;
                for (size_t a = 0; a < ends.size() && !merged; ++a)
                    for (size_t b = a + 1; b < ends.size() && !merged; ++b) {
                        if (ends[a].path == ends[b].path) continue;
                        for (int jp = 0; jp < k && !merged; ++jp) {
                            if (jp == j || counts[j][jp] == 0) continue;
                            auto in_pair = [&](EdgeId e) {
                                int cu = ctx.cluster_of[g.edge(e).u], cv = ctx.cluster_of[g.edge(e).v];
                                return (cu == j && cv == jp) || (cu == jp && cv == j);
                            };
                            auto link = ls.find(ends[a].v, ends[b].v, occ, in_pair, 4);
                            if (!link) continue;
                            ls.commit(*link, occ, res.used[i]);
                            Walk w = join(g, paths[ends[a].path], ends[a].v, link->edges, paths[ends[b].path], ends[b].v);
                            int hi = std::max(ends[a].path, ends[b].path), lo = std::min(ends[a].path, ends[b].path);
                            paths.erase(paths.begin() + hi);
                            paths[lo] = std::move(w);
                            merged = true;
                        }
                    }
                if (!merged)
                    throw OperationalError("tie_many", "forest " + std::to_string(i) + ": no eligible link in cluster " +
                                                           std::to_string(j));
            }
        }
        std::vector<int> per(k, 0);
        for (const auto& p : paths)
            for (Vertex x : p.vertices)
                if (ctx.cluster_of[x] >= 0) ++per[ctx.cluster_of[x]];
        Rational cap = sqrt_floor(zeta) * Rational(m);
        for (int j = 0; j < k; ++j)
            if (Rational(per[j]) > cap)
                throw OperationalError("tie_many", "forest " + std::to_string(i) + " exceeds occupancy in cluster " +
                                                       std::to_string(j));
    }
    return res;
}

TieResult tie_few(TieContext& ctx, const std::vector<LinearForest>& forests) {
    const MultiGraph& g = ctx.g;
    for (size_t i = 0; i < forests.size(); ++i) check_forest_input(g, forests[i], i);
    reserve_forest_edges(ctx, forests);
    auto comp = reduced_components(reduced_counts(g, ctx.part, &ctx.gamma));
    auto comp_of = [&](Vertex x) { return ctx.cluster_of[x] < 0 ? -1 : comp[ctx.cluster_of[x]]; };
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

    auto shape = [&](const LinkRecord& r) {
        std::map<int, int> per_cluster;
        std::map<PairKey, int> per_pair;
        for (size_t t = 1; t + 1 < r.vertices.size(); ++t) ++per_cluster[ctx.cluster_of[r.vertices[t]]];
        for (size_t t = 0; t + 1 < r.vertices.size(); ++t)
            ++per_pair[key_of(ctx.cluster_of[r.vertices[t]], ctx.cluster_of[r.vertices[t + 1]])];
        for (const auto& [c, n] : per_cluster)
            if (n > 3) return false;
        for (const auto& [c, n] : per_pair)
            if (n > 4) return false;
        return true;
    };

    TieResult res;
    res.forests = forests;
    res.used.assign(forests.size(), {});
    for (size_t i = 0; i < forests.size(); ++i) {
        auto& paths = res.forests[i].paths;
        auto occ = occupied(g, res.forests[i]);
        LinkSearch ls{ctx, static_cast<int>(i), "tie_few"};
        for (int c = 0; c < ncomp; ++c) {
            auto in_comp = [&](EdgeId e) { return comp_of(g.edge(e).u) == c && comp_of(g.edge(e).v) == c; };
            for (;;) {
                std::vector<End> ends;
                std::set<int> hosting;
                for (int p = 0; p < static_cast<int>(paths.size()); ++p)
                    for (Vertex x : {paths[p].front(), paths[p].back()})
                        if (comp_of(x) == c) {
                            ends.push_back({p, x});
                            hosting.insert(p);
                        }
                if (hosting.size() <= 1) break;
                bool merged = false;
                for (size_t a = 0; a < ends.size() && !merged; ++a)
                    for (size_t b = a + 1; b < ends.size() && !merged; ++b) {
                        if (ends[a].path == ends[b].path) continue;
                        auto link = ls.find(ends[a].v, ends[b].v, occ, in_comp, -1, shape);
                        if (!link) continue;
                        ls.commit(*link, occ, res.used[i]);
                        Walk w = join(g, paths[ends[a].path], ends[a].v, link->edges, paths[ends[b].path], ends[b].v);
                        int hi = std::max(ends[a].path, ends[b].path), lo = std::min(ends[a].path, ends[b].path);
                        paths.erase(paths.begin() + hi);
                        paths[lo] = std::move(w);
                        merged = true;
                    }
                if (!merged)
                    throw OperationalError("tie_few", "forest " + std::to_string(i) + ": no link inside component " +
                                                          std::to_string(c));
            }
        }
    }
    return res;
}

CloseResult close_into_cycles(TieContext& ctx, const std::vector<LinearForest>& forests, bool use_bridges) {
    const MultiGraph& g = ctx.g;
    for (size_t i = 0; i < forests.size(); ++i) check_forest_input(g, forests[i], i);
    if (use_bridges) {
        if (ctx.gamma_prime.empty()) throw std::invalid_argument("close_into_cycles: bridge mode needs gamma'");
        auto r = reduced_counts(g, ctx.part, &ctx.gamma);
        auto rp = reduced_counts(g, ctx.part, &ctx.gamma_prime);
        for (size_t a = 0; a < r.size(); ++a)
            for (size_t b = 0; b < r.size(); ++b) r[a][b] += rp[a][b];
        auto comp = reduced_components(r);
        if (std::any_of(comp.begin(), comp.end(), [](int c) { return c != 0; }))
            throw std::invalid_argument("close_into_cycles: R and R' together are disconnected");
    }
    reserve_forest_edges(ctx, forests);
    CloseResult res;
    res.used.assign(forests.size(), {});
    auto any = [](EdgeId) { return true; };
    for (size_t i = 0; i < forests.size(); ++i) {
        std::vector<Walk> paths = forests[i].paths;
        if (paths.empty()) continue;
        LinearForest cur{paths};
        auto occ = occupied(g, cur);
        LinkSearch ls{ctx, static_cast<int>(i), "close", use_bridges};
        size_t L = paths.size();
        std::vector<LinkRecord> links;
        for (size_t j = 0; j < L; ++j) {
            Vertex x = paths[j].back();
            std::optional<LinkRecord> link;
            if (j + 1 < L) {
                link = ls.find(x, paths[j + 1].front(), occ, any, -1);
                if (!link) {
                    link = ls.find(x, paths[j + 1].back(), occ, any, -1);
                    if (link) paths[j + 1] = reversed(paths[j + 1]);
                }
            } else {
                link = ls.find(x, paths[0].front(), occ, any, -1);
            }
            if (!link)
                throw OperationalError("close_into_cycles", "forest " + std::to_string(i) + ": no link after path " +
                                                                std::to_string(j));
            res.bridge_edges += ls.commit(*link, occ, res.used[i]);
            links.push_back(*link);
        }
        std::vector<EdgeId> edges;
        for (size_t j = 0; j < L; ++j) {
            edges.insert(edges.end(), paths[j].edges.begin(), paths[j].edges.end());
            edges.insert(edges.end(), links[j].edges.begin(), links[j].edges.end());
        }
        res.cycles.push_back(walk_from_edges(g, WalkKind::Cycle, paths[0].front(), edges));
    }
    return res;
}

SparseCover cover_sparse_leftover(TieContext& ctx, const std::vector<EdgeId>& H, const Rational& beta,
                                  const Rational& zeta, const Rational& dcap, Rng& rng) {
    const MultiGraph& g = ctx.g;
    SparseCover out;
    out.leftover_cap = static_cast<int>(floor_of(Rational(1) / (beta * beta)));
    out.cycle_budget = beta * Rational(g.n());
    if (H.empty()) return out;
    std::vector<EdgeId> origin;
    MultiGraph h = g.edge_subgraph(H, &origin);
    auto ds = degree_stats(h);
    if (Rational(ds.max_degree) > dcap * Rational(g.n()))
        throw std::invalid_argument("cover_sparse_leftover: max degree of H above the cap");
    for (EdgeId e : H)
        if (ctx.cluster_of[g.edge(e).u] < 0 || ctx.cluster_of[g.edge(e).v] < 0)
            throw std::invalid_argument("cover_sparse_leftover: H touches V0");
    for (EdgeId e : H) ctx.gamma[e] = 0;

    auto colours = color_classes(vizing_color(h));
    out.colour_classes = static_cast<int>(colours.size());
    std::int64_t occ_cap = std::max<std::int64_t>(1, floor_of(zeta * Rational(ctx.part.m())));
    std::vector<std::vector<EdgeId>> pieces;
    for (auto& cls : colours) {
        rng.shuffle(cls);
        std::vector<std::vector<EdgeId>> local;
        std::vector<std::vector<int>> load;
        for (EdgeId he : cls) {
            EdgeId e = origin[he];
            int cu = ctx.cluster_of[g.edge(e).u], cv = ctx.cluster_of[g.edge(e).v];
            size_t t = 0;
            for (; t < local.size(); ++t)
                if (load[t][cu] + 1 + (cu == cv) <= occ_cap && load[t][cv] + 1 + (cu == cv) <= occ_cap) break;
            if (t == local.size()) {
                local.emplace_back();
                load.emplace_back(ctx.part.k(), 0);
            }
            local[t].push_back(e);
            ++load[t][cu];
            ++load[t][cv];
        }
        for (auto& p : local) pieces.push_back(std::move(p));
    }
    out.pieces = static_cast<int>(pieces.size());

    for (size_t t = 0; t < pieces.size(); ++t) {
        LinearForest f;
        for (EdgeId e : pieces[t]) f.paths.push_back(walk_from_edges(g, WalkKind::Path, g.edge(e).u, {e}));
        auto gamma = ctx.gamma;
        auto gamma_prime = ctx.gamma_prime;
        auto budget = ctx.budget;
        auto trace_size = ctx.trace.size();
        auto gp_use = ctx.gamma_prime_use;
        ctx.forest_base = static_cast<int>(t);
        try {
            auto a = tie_many(ctx, {f}, beta, zeta);
            auto b = tie_few(ctx, a.forests);
            auto c = close_into_cycles(ctx, b.forests);
            out.cycles.push_back(c.cycles.front());
            for (const auto* u : {&a.used[0], &b.used[0], &c.used[0]})
                out.gamma_used.insert(out.gamma_used.end(), u->begin(), u->end());
        } catch (const OperationalError&) {
            ctx.gamma = std::move(gamma);
            ctx.gamma_prime = std::move(gamma_prime);
            ctx.budget = std::move(budget);
            ctx.trace.resize(trace_size);
            ctx.gamma_prime_use = std::move(gp_use);
            out.leftover.insert(out.leftover.end(), pieces[t].begin(), pieces[t].end());
        }
    }
    ctx.forest_base = 0;
    std::sort(out.leftover.begin(), out.leftover.end());
    if (static_cast<int>(out.leftover.size()) > out.leftover_cap)
        throw OperationalError("cover_sparse_leftover", std::to_string(out.leftover.size()) +
                                                            " uncovered edges, above floor(1/beta^2)");
    return out;
}

MatchingTieResult matching_tie_blowup(const MultiGraph& g, const ClusterPartition& part,
                                      const std::vector<std::vector<Walk>>& sets) {
    int k = part.k();
    if (k % 2 != 0) throw std::invalid_argument("matching_tie_blowup: k must be even");
    auto cl = cluster_index(part, g.n());
    MatchingTieResult res;
    res.tie_incidence.assign(g.n(), 0);
    std::vector<char> used(g.m(), 0);
    std::vector<int> end_mult(g.n(), 0);
    std::vector<std::vector<Walk>> oriented = sets;
    for (auto& set : oriented)
        for (auto& p : set) {
            if (!check_walk(g, p).empty() || p.kind != WalkKind::Path)
                throw std::invalid_argument("matching_tie_blowup: input must be paths");
            int a = cl[p.front()], b = cl[p.back()];
            if (a < 0 || b < 0) throw std::invalid_argument("matching_tie_blowup: endpoint in V0");
            if (b == (a + 1) % k) {
            } else if (a == (b + 1) % k) {
                p = reversed(p);
            } else {
                throw std::invalid_argument("matching_tie_blowup: path endpoints not in consecutive clusters");
            }
            for (Vertex x : p.vertices) {
                int c = cl[x];
                if (c != cl[p.front()] && c != cl[p.back()])
                    throw std::invalid_argument("matching_tie_blowup: path leaves its pair");
            }
            for (EdgeId e : p.edges) {
                if (used[e]) throw std::invalid_argument("matching_tie_blowup: paths share an edge");
                used[e] = 1;
            }
            if (++end_mult[p.front()] > 4 || ++end_mult[p.back()] > 4)
                throw std::invalid_argument("matching_tie_blowup: vertex is an endpoint of more than 4 paths");
        }

    for (size_t i = 0; i < oriented.size(); ++i) {
        const auto& set = oriented[i];
        if (set.empty()) continue;
        std::vector<char> occ(g.n(), 0);
        for (const auto& p : set)
            for (Vertex x : p.vertices) occ[x] = 1;
        std::vector<EdgeId> cycle_edges;
        for (size_t t = 0; t < set.size(); ++t) {
            Vertex y = set[t].back(), x = set[(t + 1) % set.size()].front();
            int c = cl[y], cp = cl[x];
            int D = ((cp - c) % k + k) % k;
            std::vector<std::vector<int>> plans;
            auto tail = [&](std::vector<int> p) {
                for (int s = 2; s <= D; ++s) p.push_back((c + s) % k);
                return p;
            };
            if (D == 0) {
                plans.push_back({(c + 1) % k, c});
            } else {
                plans.push_back(tail({(c + 1) % k}));
                plans.push_back(tail({(c + 1) % k, c, (c + 1) % k}));
            }
            std::vector<EdgeId> best;
            std::vector<Vertex> best_v;
            for (const auto& plan : plans) {
                std::vector<EdgeId> stack_e;
                std::vector<Vertex> stack_v{y};
                std::vector<char> on(g.n(), 0);
                on[y] = 1;
                long budget = 200000;
                std::function<bool(Vertex, size_t)> dfs = [&](Vertex v, size_t s) -> bool {
                    if (--budget < 0) return false;
                    if (s == plan.size()) return v == x;
                    bool last = s + 1 == plan.size();
                    for (EdgeId e : g.incident(v)) {
                        if (used[e]) continue;
                        Vertex w = g.edge(e).other(v);
                        if (cl[w] != plan[s] || on[w]) continue;
                        if (last ? w != x : (occ[w] || res.tie_incidence[w] + 2 > 6)) continue;
                        if (last && res.tie_incidence[w] + 1 > 6) continue;
                        on[w] = 1;
                        stack_e.push_back(e);
                        stack_v.push_back(w);
                        if (dfs(w, s + 1)) return true;
                        on[w] = 0;
                        stack_e.pop_back();
                        stack_v.pop_back();
                    }
                    return false;
                };
                if (res.tie_incidence[y] + 1 <= 6 && dfs(y, 0)) {
                    best = stack_e;
                    best_v = stack_v;
                    break;
                }
            }
            if (best.empty())
                throw OperationalError("matching_tie_blowup", "set " + std::to_string(i) + ": no link after path " +
                                                                  std::to_string(t));
            for (EdgeId e : best) {
                used[e] = 1;
                ++res.tie_incidence[g.edge(e).u];
                ++res.tie_incidence[g.edge(e).v];
            }
            for (size_t q = 1; q + 1 < best_v.size(); ++q) occ[best_v[q]] = 1;
            res.links.push_back({static_cast<int>(i), "matching_tie", best_v, best});
            cycle_edges.insert(cycle_edges.end(), set[t].edges.begin(), set[t].edges.end());
            cycle_edges.insert(cycle_edges.end(), best.begin(), best.end());
        }
        res.cycles.push_back(walk_from_edges(g, WalkKind::Cycle, set[0].front(), cycle_edges));
    }
    res.max_incidence = res.tie_incidence.empty() ? 0 : *std::max_element(res.tie_incidence.begin(), res.tie_incidence.end());
    return res;
}

}  // namespace pcd

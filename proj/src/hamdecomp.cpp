#include "pcd/hamdecomp.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "pcd/regularise.hpp"

namespace pcd {

namespace {

// Local numbering: A side 0..mA-1, B side mA..mA+mB-1.
struct LocalView {
    const BipartitePair& p;
    int mA, mB, N;
    std::vector<std::vector<int>> adj;  // distinct neighbours
    std::vector<int> first_pos;         // a * mB + b -> first edge position, -1 if none

    explicit LocalView(const BipartitePair& pp) : p(pp), mA(pp.mA()), mB(pp.mB()), N(pp.mA() + pp.mB()) {
        adj.assign(N, {});
        first_pos.assign(static_cast<size_t>(mA) * mB, -1);
        const auto& le = p.local_edges();
        for (size_t i = 0; i < le.size(); ++i) {
            auto [a, b] = le[i];
            int& fp = first_pos[static_cast<size_t>(a) * mB + b];
            if (fp < 0) {
                fp = static_cast<int>(i);
                adj[a].push_back(mA + b);
                adj[mA + b].push_back(a);
            }
        }
    }
    bool adjacent(int u, int v) const { return pos(u, v) >= 0; }
    int pos(int u, int v) const {
        if (u >= mA) std::swap(u, v);
        if (u >= mA || v < mA) return -1;
        return first_pos[static_cast<size_t>(u) * mB + (v - mA)];
    }
    Vertex label(int v) const { return v < mA ? p.A()[v] : p.B()[v - mA]; }
};

PairCycle to_pair_cycle(const LocalView& lv, const std::vector<int>& order) {
    PairCycle c;
    for (size_t i = 0; i < order.size(); ++i) {
        int u = order[i], v = order[(i + 1) % order.size()];
        c.vertices.push_back(lv.label(u));
        c.edges.push_back(lv.p.edge_ids()[lv.pos(u, v)]);
    }
    return c;
}

std::optional<std::vector<int>> posa_attempt(const LocalView& lv, Rng& rng, long steps) {
    const int N = lv.N;
    std::vector<int> path{static_cast<int>(rng.below(N))};
    std::vector<int> pos(N, -1);
    pos[path[0]] = 0;
    auto reverse_tail = [&](size_t from) {
        std::reverse(path.begin() + static_cast<long>(from), path.end());
        for (size_t j = from; j < path.size(); ++j) pos[path[j]] = static_cast<int>(j);
    };
    std::vector<int> cand;
    for (long step = 0; step < steps; ++step) {
        int v = path.back();
        if (static_cast<int>(path.size()) == N) {
            if (lv.adjacent(path.front(), v)) return path;
        } else {
            cand.clear();
            for (int w : lv.adj[v])
                if (pos[w] < 0) cand.push_back(w);
            if (!cand.empty()) {
                int w = cand[rng.below(cand.size())];
                pos[w] = static_cast<int>(path.size());
                path.push_back(w);
                continue;
            }
        }
        if (rng.below(4) == 0) {
            reverse_tail(0);
            v = path.back();
        }
        cand.clear();
        for (int w : lv.adj[v])
            if (pos[w] >= 0 && pos[w] + 2 < static_cast<int>(path.size())) cand.push_back(w);
        if (cand.empty()) return std::nullopt;
        int w = cand[rng.below(cand.size())];
        reverse_tail(static_cast<size_t>(pos[w]) + 1);
    }
    return std::nullopt;
}

std::optional<std::vector<int>> exhaustive_hamilton(const LocalView& lv) {
    const int N = lv.N;
    std::vector<int> path{0};
    std::vector<char> used(N, 0);
    used[0] = 1;
    std::function<bool()> dfs = [&]() -> bool {
        int v = path.back();
        if (static_cast<int>(path.size()) == N) return lv.adjacent(v, 0);
        for (int w : lv.adj[v]) {
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(w);
            if (dfs()) return true;
            path.pop_back();
            used[w] = 0;
        }
        return false;
    };
    if (dfs()) return path;
    return std::nullopt;
}

}  // namespace

PairCycle bipartite_hamilton(const BipartitePair& p, Rng& rng, const HamiltonOptions& opt) {
    if (p.mA() != p.mB()) throw std::invalid_argument("bipartite_hamilton: pair is not balanced");
    if (p.mA() == 0) throw std::invalid_argument("bipartite_hamilton: empty pair");
    LocalView lv(p);
    if (p.mA() == 1) {
        if (p.count(0, 0) < 2) throw OperationalError("bipartite_hamilton", "single vertex pair without a 2-cycle");
        PairCycle c;
        c.vertices = {p.A()[0], p.B()[0]};
        c.edges = {p.edge_ids()[0], p.edge_ids()[1]};
        return c;
    }
    for (int v = 0; v < lv.N; ++v)
        if (lv.adj[v].size() < 2)
            throw OperationalError("bipartite_hamilton", "vertex " + std::to_string(lv.label(v)) + " has fewer than 2 neighbours");
    const long restarts = static_cast<long>(opt.restarts_per_vertex) * p.mA();
    const long steps = 20L * lv.N * lv.N;
    for (long t = 0; t < restarts; ++t) {
        auto path = posa_attempt(lv, rng, steps);
        if (path) return to_pair_cycle(lv, *path);
        if (lv.N <= opt.exhaustive_limit && t >= 3) break;
    }
    if (lv.N <= opt.exhaustive_limit) {
        auto path = exhaustive_hamilton(lv);
        if (path) return to_pair_cycle(lv, *path);
        throw OperationalError("bipartite_hamilton", "exhaustive search: no Hamilton cycle exists");
    }
    throw OperationalError("bipartite_hamilton", "rotation-extension budget exhausted");
}

std::string check_pair_cycle(const BipartitePair& p, const PairCycle& c, bool spanning) {
    if (c.vertices.size() != c.edges.size() || c.vertices.size() < 2) return "malformed cycle";
    std::map<EdgeId, std::pair<Vertex, Vertex>> ends;
    for (size_t i = 0; i < p.edge_ids().size(); ++i) {
        auto [a, b] = p.local_edges()[i];
        ends[p.edge_ids()[i]] = std::pair<Vertex, Vertex>(std::minmax(p.A()[a], p.B()[b]));
    }
    std::set<Vertex> vs(c.vertices.begin(), c.vertices.end());
    if (vs.size() != c.vertices.size()) return "repeated vertex";
    std::set<EdgeId> es(c.edges.begin(), c.edges.end());
    if (es.size() != c.edges.size()) return "repeated edge";
    for (size_t i = 0; i < c.edges.size(); ++i) {
        auto it = ends.find(c.edges[i]);
        if (it == ends.end()) return "edge " + std::to_string(c.edges[i]) + " not in pair";
        if (it->second != std::pair<Vertex, Vertex>(std::minmax(c.vertices[i], c.vertices[(i + 1) % c.vertices.size()])))
            return "edge " + std::to_string(c.edges[i]) + " does not join consecutive vertices";
    }
    if (spanning && static_cast<int>(vs.size()) != p.mA() + p.mB()) return "cycle is not spanning";
    return {};
}

PairMatching bipartite_perfect_matching(const BipartitePair& p) {
    if (p.mA() != p.mB()) throw std::invalid_argument("bipartite_perfect_matching: pair is not balanced");
    const int mA = p.mA(), mB = p.mB();
    std::vector<std::vector<std::pair<int, int>>> adj(mA);
    for (size_t i = 0; i < p.local_edges().size(); ++i) {
        auto [a, b] = p.local_edges()[i];
        adj[a].emplace_back(b, static_cast<int>(i));
    }
    std::vector<int> mate_a(mA, -1), mate_b(mB, -1), epos(mA, -1), dist(mA);
    const int INF = INT32_MAX;
    auto bfs = [&]() {
        std::deque<int> q;
        bool found = false;
        for (int a = 0; a < mA; ++a) {
            dist[a] = mate_a[a] < 0 ? 0 : INF;
            if (mate_a[a] < 0) q.push_back(a);
        }
        while (!q.empty()) {
            int a = q.front();
            q.pop_front();
            for (auto [b, pos] : adj[a]) {
                int a2 = mate_b[b];
                if (a2 < 0)
                    found = true;
                else if (dist[a2] == INF) {
                    dist[a2] = dist[a] + 1;
                    q.push_back(a2);
                }
            }
        }
        return found;
    };
    std::function<bool(int)> dfs = [&](int a) -> bool {
        for (auto [b, pos] : adj[a]) {
            int a2 = mate_b[b];
            if (a2 < 0 || (dist[a2] == dist[a] + 1 && dfs(a2))) {
                mate_a[a] = b;
                mate_b[b] = a;
                epos[a] = pos;
                return true;
            }
        }
        dist[a] = INF;
        return false;
    };
    while (bfs())
        for (int a = 0; a < mA; ++a)
            if (mate_a[a] < 0) dfs(a);
    PairMatching res;
    res.mate_a = mate_a;
    res.edge_pos = epos;
    res.perfect = std::find(mate_a.begin(), mate_a.end(), -1) == mate_a.end();
    if (!res.perfect) {
        int root = static_cast<int>(std::find(mate_a.begin(), mate_a.end(), -1) - mate_a.begin());
        std::vector<char> seenA(mA, 0), seenB(mB, 0);
        std::deque<int> q{root};
        seenA[root] = 1;
        while (!q.empty()) {
            int a = q.front();
            q.pop_front();
            for (auto [b, pos] : adj[a]) {
                if (seenB[b]) continue;
                seenB[b] = 1;
                int a2 = mate_b[b];
                if (a2 >= 0 && !seenA[a2]) {
                    seenA[a2] = 1;
                    q.push_back(a2);
                }
            }
        }
        for (int a = 0; a < mA; ++a)
            if (seenA[a]) res.hall_violator.push_back(p.A()[a]);
        for (int b = 0; b < mB; ++b)
            if (seenB[b]) res.hall_neighbours.push_back(p.B()[b]);
    }
    return res;
}

std::vector<std::vector<int>> regular_bipartite_matching_decomposition(const BipartitePair& p) {
    if (p.mA() != p.mB()) throw std::invalid_argument("matching decomposition: pair is not balanced");
    const int r = p.mA() ? p.degA(0) : 0;
    for (int a = 0; a < p.mA(); ++a)
        if (p.degA(a) != r) throw std::invalid_argument("matching decomposition: pair is not regular");
    for (int b = 0; b < p.mB(); ++b)
        if (p.degB(b) != r) throw std::invalid_argument("matching decomposition: pair is not regular");
    std::vector<int> remaining(p.local_edges().size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<std::vector<int>> out;
    for (int t = 0; t < r; ++t) {
        BipartitePair sub = p.with_edges(remaining);
        auto pm = bipartite_perfect_matching(sub);
        if (!pm.perfect) throw std::logic_error("regular bipartite graph without a perfect matching");
        std::vector<int> mt;
        std::set<int> drop;
        for (int pos : pm.edge_pos) {
            mt.push_back(remaining[pos]);
            drop.insert(pos);
        }
        std::sort(mt.begin(), mt.end());
        out.push_back(mt);
        std::vector<int> next;
        for (size_t i = 0; i < remaining.size(); ++i)
            if (!drop.count(static_cast<int>(i))) next.push_back(remaining[i]);
        remaining = std::move(next);
    }
    return out;
}

std::string check_chain(const MultiGraph& g, const MatchingChain& chain) {
    const size_t k = chain.clusters.size();
    if (k < 3) return "chain needs k >= 3";
    if (chain.matchings.size() != k - 1) return "chain needs k-1 matchings";
    const size_t m = chain.clusters[0].size();
    for (size_t i = 0; i + 1 < k; ++i) {
        if (chain.clusters[i + 1].size() != m) return "clusters differ in size";
        std::set<Vertex> L(chain.clusters[i].begin(), chain.clusters[i].end());
        std::set<Vertex> Rt(chain.clusters[i + 1].begin(), chain.clusters[i + 1].end());
        std::set<Vertex> seen;
        if (chain.matchings[i].size() != m) return "matching " + std::to_string(i) + " is not perfect";
        for (EdgeId e : chain.matchings[i]) {
            const Edge& ed = g.edge(e);
            bool ok = (L.count(ed.u) && Rt.count(ed.v)) || (L.count(ed.v) && Rt.count(ed.u));
            if (!ok) return "matching edge " + std::to_string(e) + " leaves its pair";
            if (!seen.insert(ed.u).second || !seen.insert(ed.v).second) return "matching " + std::to_string(i) + " repeats a vertex";
        }
    }
    return {};
}

ClosingResult close_matchings_to_hamilton(const MultiGraph& g, const MatchingChain& chain, const BipartitePair& p) {
    std::string why = check_chain(g, chain);
    if (!why.empty()) throw std::invalid_argument("close_matchings_to_hamilton: " + why);
    const auto& V1 = chain.clusters.front();
    const auto& Vk = chain.clusters.back();
    const int m = static_cast<int>(V1.size());
    auto same = [](std::vector<Vertex> a, std::vector<Vertex> b) {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    };
    bool one_is_A;
    if (same(p.A(), V1) && same(p.B(), Vk))
        one_is_A = true;
    else if (same(p.B(), V1) && same(p.A(), Vk))
        one_is_A = false;
    else
        throw std::invalid_argument("close_matchings_to_hamilton: closing pair must join V_1 and V_k");
    const auto& one = one_is_A ? p.A() : p.B();
    const auto& kk = one_is_A ? p.B() : p.A();
    std::unordered_map<Vertex, int> one_idx, kk_idx;
    for (int i = 0; i < m; ++i) {
        one_idx[one[i]] = i;
        kk_idx[kk[i]] = i;
    }
    // chain step maps
    std::vector<std::unordered_map<Vertex, EdgeId>> step(chain.matchings.size());
    for (size_t i = 0; i < chain.matchings.size(); ++i)
        for (EdgeId e : chain.matchings[i]) {
            step[i][g.edge(e).u] = e;
            step[i][g.edge(e).v] = e;
        }
    std::vector<int> sigma(m), sigma_inv(m);
    std::vector<std::vector<EdgeId>> chain_edges(m);
    for (int x = 0; x < m; ++x) {
        Vertex cur = one[x];
        for (size_t i = 0; i < step.size(); ++i) {
            EdgeId e = step[i].at(cur);
            chain_edges[x].push_back(e);
            cur = g.edge(e).other(cur);
        }
        sigma[x] = kk_idx.at(cur);
        sigma_inv[sigma[x]] = x;
    }
    // closing pair edges in (kk, one) orientation
    std::vector<std::pair<int, int>> ce;
    std::vector<int> first(static_cast<size_t>(m) * m, -1);
    for (size_t i = 0; i < p.local_edges().size(); ++i) {
        auto [a, b] = p.local_edges()[i];
        int y = one_is_A ? b : a, x = one_is_A ? a : b;
        ce.emplace_back(y, x);
        if (first[static_cast<size_t>(y) * m + x] < 0) first[static_cast<size_t>(y) * m + x] = static_cast<int>(i);
    }
    auto pm = bipartite_perfect_matching(p);
    if (!pm.perfect) throw OperationalError("close_matchings_to_hamilton", "closing pair has no perfect matching");
    std::vector<int> mk(m), mk_inv(m);
    for (int a = 0; a < m; ++a) {
        int b = pm.mate_a[a];
        int y = one_is_A ? b : a, x = one_is_A ? a : b;
        mk[y] = x;
        mk_inv[x] = y;
    }
    auto cycles_of = [&](std::vector<int>& cid, std::vector<int>& csize) {
        cid.assign(m, -1);
        csize.clear();
        for (int x = 0; x < m; ++x) {
            if (cid[x] >= 0) continue;
            int c = static_cast<int>(csize.size());
            int len = 0;
            for (int y = x; cid[y] < 0; y = mk[sigma[y]]) {
                cid[y] = c;
                ++len;
            }
            csize.push_back(len);
        }
        return static_cast<int>(csize.size());
    };
    ClosingResult res;
    std::vector<int> cid, csize;
    int count = cycles_of(cid, csize);
    res.cycle_counts.push_back(count);
    while (count > 1) {
        int best_score = -1, by1 = -1, by2 = -1;
        for (auto [y1, x2] : ce) {
            if (mk[y1] == x2) continue;
            int y2 = mk_inv[x2], x1 = mk[y1];
            if (first[static_cast<size_t>(y2) * m + x1] < 0) continue;
            int c1 = cid[sigma_inv[y1]], c2 = cid[sigma_inv[y2]];
            if (c1 == c2) continue;
            int score = csize[c1] + csize[c2];
            if (score > best_score) {
                best_score = score;
                by1 = y1;
                by2 = y2;
            }
        }
        if (by1 < 0) break;
        int x1 = mk[by1], x2 = mk[by2];
        mk[by1] = x2;
        mk[by2] = x1;
        mk_inv[x2] = by1;
        mk_inv[x1] = by2;
        int next = cycles_of(cid, csize);
        if (next != count - 1) throw std::logic_error("closing swap did not merge exactly two cycles");
        count = next;
        res.cycle_counts.push_back(count);
    }
    if (count > 1) {
        // enumerate perfect matchings of the closing pair
        std::vector<std::vector<int>> nb(m);
        for (auto [y, x] : ce)
            if (std::find(nb[y].begin(), nb[y].end(), x) == nb[y].end()) nb[y].push_back(x);
        std::vector<int> assign(m, -1);
        std::vector<char> taken(m, 0);
        long visited = 0;
        bool found = false;
        std::function<void(int)> rec = [&](int y) {
            if (found || visited > kMatchingEnumerationCap) return;
            if (y == m) {
                ++visited;
                int x = 0, len = 0;
                do {
                    x = assign[sigma[x]];
                    ++len;
                } while (x != 0);
                if (len == m) found = true;
                return;
            }
            for (int x : nb[y]) {
                if (taken[x]) continue;
                taken[x] = 1;
                assign[y] = x;
                rec(y + 1);
                if (found) return;
                taken[x] = 0;
            }
        };
        rec(0);
        if (!found) {
            std::string sizes;
            for (int s : csize) sizes += (sizes.empty() ? "" : ",") + std::to_string(s);
            throw OperationalError("close_matchings_to_hamilton",
                                   "no merging swap; permutation cycle sizes [" + sizes + "]" +
                                       (visited > kMatchingEnumerationCap ? ", enumeration cap hit" : ""));
        }
        mk = assign;
        res.exhaustive = true;
        res.cycle_counts.push_back(1);
    }
    std::vector<EdgeId> edges;
    int x = 0;
    for (int t = 0; t < m; ++t) {
        edges.insert(edges.end(), chain_edges[x].begin(), chain_edges[x].end());
        int y = sigma[x];
        EdgeId me = p.edge_ids()[first[static_cast<size_t>(y) * m + mk[y]]];
        edges.push_back(me);
        res.matching.push_back(me);
        x = mk[y];
    }
    std::sort(res.matching.begin(), res.matching.end());
    res.cycle = walk_from_edges(g, WalkKind::Cycle, one[0], edges);
    return res;
}

PackingResult hamilton_packing(const BipartitePair& p, const Rational& eps, const Rational& d, Rng& rng,
                               const HamiltonOptions& opt) {
    PackingResult res;
    res.target = static_cast<int>(std::max<std::int64_t>(0, floor_of((d - 19 * eps) * p.mA() / 2)));
    if (p.mA() != p.mB()) throw std::invalid_argument("hamilton_packing: pair is not balanced");
    std::unordered_map<EdgeId, int> pos_of;
    for (size_t i = 0; i < p.edge_ids().size(); ++i) pos_of[p.edge_ids()[i]] = static_cast<int>(i);
    std::vector<int> remaining(p.edge_ids().size());
    std::iota(remaining.begin(), remaining.end(), 0);
    auto remove = [&](const PairCycle& c) {
        std::set<int> drop;
        for (EdgeId e : c.edges) drop.insert(pos_of.at(e));
        std::vector<int> next;
        for (int q : remaining)
            if (!drop.count(q)) next.push_back(q);
        remaining = std::move(next);
    };
    while (!remaining.empty() && p.mA() > 0) {
        BipartitePair sub = p.with_edges(remaining);
        bool four_regular = true;
        for (int a = 0; a < sub.mA(); ++a) four_regular = four_regular && sub.degA(a) == 4;
        for (int b = 0; b < sub.mB(); ++b) four_regular = four_regular && sub.degB(b) == 4;
        try {
            PairCycle c = bipartite_hamilton(sub, rng, opt);
            if (four_regular) {
                // look ahead: prefer a cycle whose complement is itself a Hamilton cycle
                for (int t = 0; t < 200; ++t) {
                    std::set<EdgeId> used(c.edges.begin(), c.edges.end());
                    std::vector<int> rest;
                    for (int q : remaining)
                        if (!used.count(p.edge_ids()[q])) rest.push_back(q);
                    MultiGraph h = p.with_edges(rest).to_graph();
                    if (connected_components(h).size() == 1) break;
                    c = bipartite_hamilton(sub, rng, opt);
                }
            }
            res.cycles.push_back(c);
            remove(c);
        } catch (const OperationalError&) {
            break;
        }
    }
    res.covers_all_edges = remaining.empty();
    return res;
}

std::vector<Walk> disjoint_cycles_through_clusters(const MultiGraph& g, const std::vector<std::vector<Vertex>>& clusters,
                                                   int t) {
    const int k = static_cast<int>(clusters.size());
    if (k < 3) throw std::invalid_argument("disjoint_cycles_through_clusters: k must be >= 3");
    const int m = static_cast<int>(clusters[0].size());
    if (t < 0 || t > m) throw std::invalid_argument("disjoint_cycles_through_clusters: need 0 <= t <= m");
    std::vector<int> cl(g.n(), -1);
    for (int i = 0; i < k; ++i)
        for (Vertex x : clusters[i]) cl[x] = i;
    std::vector<char> used(g.n(), 0);
    auto edge_between = [&](Vertex a, Vertex b) -> EdgeId {
        for (EdgeId e : g.incident(a))
            if (g.edge(e).other(a) == b) return e;
        return -1;
    };
    auto nbrs_in = [&](Vertex x, int c) {
        std::vector<Vertex> out;
        for (EdgeId e : g.incident(x)) {
            Vertex y = g.edge(e).other(x);
            if (cl[y] == c && !used[y] && std::find(out.begin(), out.end(), y) == out.end()) out.push_back(y);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<Walk> out;
    long budget = 2000000;
    for (int c = 0; c < t; ++c) {
        std::vector<Vertex> path;
        std::vector<Vertex> closing;
        std::function<bool()> grow = [&]() -> bool {
            if (--budget < 0) return false;
            int i = static_cast<int>(path.size());  // next cluster index
            if (i == k - 2) {
                auto S = nbrs_in(path.back(), k - 2);
                auto T = nbrs_in(path.front(), k - 1);
                for (Vertex s : S)
                    for (Vertex tt : T)
                        if (s != tt && edge_between(s, tt) >= 0) {
                            closing = {s, tt};
                            return true;
                        }
                return false;
            }
            for (Vertex y : nbrs_in(path.back(), i)) {
                used[y] = 1;
                path.push_back(y);
                if (grow()) return true;
                path.pop_back();
                used[y] = 0;
            }
            return false;
        };
        bool ok = false;
        for (Vertex x1 : clusters[0]) {
            if (used[x1]) continue;
            used[x1] = 1;
            path = {x1};
            if (grow()) {
                ok = true;
                break;
            }
            used[x1] = 0;
        }
        if (!ok)
            throw OperationalError("disjoint_cycles_through_clusters",
                                   "greedy stuck after " + std::to_string(out.size()) + " of " + std::to_string(t) + " cycles");
        std::vector<Vertex> cyc = path;
        cyc.push_back(closing[0]);
        cyc.push_back(closing[1]);
        for (Vertex x : cyc) used[x] = 1;
        std::vector<EdgeId> es;
        for (size_t i = 0; i < cyc.size(); ++i) es.push_back(edge_between(cyc[i], cyc[(i + 1) % cyc.size()]));
        out.push_back(walk_from_edges(g, WalkKind::Cycle, cyc[0], es));
    }
    return out;
}

std::vector<EdgeId> parity_surgery(const BipartitePair& p, Rng& rng) {
    std::vector<int> odd_local;
    bool any_odd = false;
    for (int a = 0; a < p.mA(); ++a) any_odd = any_odd || p.degA(a) % 2;
    for (int b = 0; b < p.mB(); ++b) any_odd = any_odd || p.degB(b) % 2;
    if (!any_odd) return {};
    PairCycle c = bipartite_hamilton(p, rng);
    std::map<Vertex, int> deg;
    for (int a = 0; a < p.mA(); ++a) deg[p.A()[a]] = p.degA(a);
    for (int b = 0; b < p.mB(); ++b) deg[p.B()[b]] = p.degB(b);
    std::vector<size_t> idx;
    for (size_t i = 0; i < c.vertices.size(); ++i)
        if (deg[c.vertices[i]] % 2) idx.push_back(i);
    std::vector<EdgeId> removed;
    for (size_t s = 0; s + 1 < idx.size(); s += 2)
        for (size_t j = idx[s]; j < idx[s + 1]; ++j) removed.push_back(c.edges[j]);
    std::sort(removed.begin(), removed.end());
    return removed;
}

namespace {

struct PairInfo {
    BipartitePair pair;             // G_i = g[V_i, V_{i+1}]
    std::vector<EdgeId> gamma;      // remaining Gamma_i edges
    std::vector<std::vector<EdgeId>> pool;  // perfect matchings of G''_i
    std::vector<char> pool_used;
    std::vector<int> quota;         // matchings handed to each ell
};

}  // namespace

ApproxDecompResult approx_decompose_blowup(const MultiGraph& g, const ClusterPartition& part, int r, Rng& rng,
                                           const ApproxDecompOptions& opt) {
    const int k = part.k(), m = part.m();
    if (k < 3) throw std::invalid_argument("approx_decompose_blowup: the reduced cycle needs k >= 3");
    std::string why = check_partition(part, g.n());
    if (!why.empty()) throw std::invalid_argument("approx_decompose_blowup: " + why);
    auto cidx = cluster_index(part, g.n());
    for (Vertex x : part.V0)
        if (g.degree(x) > 0) throw std::invalid_argument("approx_decompose_blowup: V0 vertex " + std::to_string(x) + " is not isolated");
    for (const auto& e : g.edges()) {
        int a = cidx[e.u], b = cidx[e.v];
        if (!((b - a + k) % k == 1 || (a - b + k) % k == 1))
            throw std::invalid_argument("approx_decompose_blowup: edge " + std::to_string(e.id) + " is not on the reduced cycle");
    }
    std::vector<BipartitePair> pairs;
    int dm = -1;
    for (int i = 0; i < k; ++i) {
        pairs.push_back(BipartitePair::from_graph(g, part.clusters[i], part.clusters[(i + 1) % k]));
        const auto& p = pairs.back();
        for (int a = 0; a < m; ++a) {
            if (dm < 0) dm = p.degA(a);
            if (p.degA(a) != dm || p.degB(a) != dm)
                throw std::invalid_argument("approx_decompose_blowup: pair " + std::to_string(i) + " is not regular of common degree");
        }
    }
    if (r < 1) throw std::invalid_argument("approx_decompose_blowup: r must be positive");
    const int h = dm - r;
    if (h < 1 || h % k) throw std::invalid_argument("approx_decompose_blowup: h = dm - r must be a positive multiple of k");
    const int per = h / k, keep = (k - 1) * per;
    const int t = opt.gamma_matchings;
    if (t < per) throw std::invalid_argument("approx_decompose_blowup: Gamma needs at least h/k perfect matchings");
    if (dm - t < keep) throw std::invalid_argument("approx_decompose_blowup: dm - |Gamma| < (k-1)h/k");

    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        ApproxDecompResult res;
        res.r = r;
        res.h = h;
        res.attempts = attempt;
        std::vector<PairInfo> info(k);
        try {
            for (int i = 0; i < k; ++i) {
                const auto& P = pairs[i];
                auto pms = regular_bipartite_matching_decomposition(P);
                rng.shuffle(pms);
                std::set<int> gpos;
                for (int s = 0; s < t; ++s) gpos.insert(pms[s].begin(), pms[s].end());
                std::vector<int> rest;
                for (int q = 0; q < static_cast<int>(P.edge_ids().size()); ++q) {
                    if (gpos.count(q))
                        info[i].gamma.push_back(P.edge_ids()[q]);
                    else
                        rest.push_back(q);
                }
                BipartitePair Gp = P.with_edges(rest);
                // parity surgery
                auto surg = parity_surgery(Gp, rng);
                if (!surg.empty()) {
                    std::set<EdgeId> s(surg.begin(), surg.end());
                    std::vector<int> keep_pos;
                    for (int q = 0; q < static_cast<int>(Gp.edge_ids().size()); ++q)
                        if (!s.count(Gp.edge_ids()[q])) keep_pos.push_back(q);
                    Gp = Gp.with_edges(keep_pos);
                    res.surgery.insert(res.surgery.end(), surg.begin(), surg.end());
                    res.trace.push_back("pair " + std::to_string(i) + ": surgery removed " + std::to_string(surg.size()) + " edges");
                }
                if (Gp.max_degree() != Gp.min_degree()) {
                    auto reg = regularise_pair(Gp, rng);
                    std::set<EdgeId> kept(reg.kept.begin(), reg.kept.end());
                    std::vector<int> keep_pos;
                    for (int q = 0; q < static_cast<int>(Gp.edge_ids().size()); ++q) {
                        if (kept.count(Gp.edge_ids()[q]))
                            keep_pos.push_back(q);
                        else
                            res.trimmed.push_back(Gp.edge_ids()[q]);
                    }
                    Gp = Gp.with_edges(keep_pos);
                    res.trace.push_back("pair " + std::to_string(i) + ": regularised with " + std::to_string(reg.removed.size()) + " cycles");
                }
                if (Gp.min_degree() < keep)
                    throw OperationalError("approx_decompose_blowup", "pair " + std::to_string(i) + " regular degree below (k-1)h/k");
                auto mts = regular_bipartite_matching_decomposition(Gp);
                for (size_t s = 0; s < mts.size(); ++s) {
                    std::vector<EdgeId> ids;
                    for (int q : mts[s]) ids.push_back(Gp.edge_ids()[q]);
                    if (static_cast<int>(s) < static_cast<int>(mts.size()) - keep)
                        res.trimmed.insert(res.trimmed.end(), ids.begin(), ids.end());
                    else
                        info[i].pool.push_back(ids);
                }
                info[i].pool_used.assign(info[i].pool.size(), 0);
                info[i].quota.assign(k, 0);
            }
            for (int ell = 0; ell < k; ++ell) {
                for (int s = 0; s < per; ++s) {
                    // chain V_{ell+1} -> ... -> V_ell through pairs ell+1, ..., ell+k-1
                    std::vector<int> order;
                    for (int j = 1; j < k; ++j) order.push_back((ell + j) % k);
                    std::vector<std::vector<int>> choices;
                    for (int i : order) {
                        std::vector<int> c;
                        if (info[i].quota[ell] < per)
                            for (size_t q = 0; q < info[i].pool.size(); ++q)
                                if (!info[i].pool_used[q]) c.push_back(static_cast<int>(q));
                        rng.shuffle(c);
                        choices.push_back(c);
                    }
                    MatchingChain chain;
                    for (int j = 1; j <= k; ++j) chain.clusters.push_back(part.clusters[(ell + j) % k]);
                    std::vector<int> pick(order.size(), 0);
                    bool done = false;
                    long tried = 0;
                    for (const auto& c : choices)
                        if (c.empty()) throw OperationalError("approx_decompose_blowup", "matching pool exhausted");
                    std::vector<char> alive(g.m(), 0);
                    for (EdgeId e : info[ell].gamma) alive[e] = 1;
                    BipartitePair closing = BipartitePair::from_graph(g, part.clusters[ell], part.clusters[(ell + 1) % k], &alive);
                    while (!done && tried < 5000) {
                        ++tried;
                        chain.matchings.clear();
                        for (size_t j = 0; j < order.size(); ++j)
                            chain.matchings.push_back(info[order[j]].pool[choices[j][pick[j]]]);
                        try {
                            auto cr = close_matchings_to_hamilton(g, chain, closing);
                            res.cycles.push_back(cr.cycle);
                            std::set<EdgeId> used(cr.matching.begin(), cr.matching.end());
                            std::vector<EdgeId> rest;
                            for (EdgeId e : info[ell].gamma)
                                if (!used.count(e)) rest.push_back(e);
                            info[ell].gamma = rest;
                            for (size_t j = 0; j < order.size(); ++j) {
                                info[order[j]].pool_used[choices[j][pick[j]]] = 1;
                                ++info[order[j]].quota[ell];
                            }
                            done = true;
                        } catch (const OperationalError&) {
                            size_t j = 0;
                            while (j < pick.size() && ++pick[j] == static_cast<int>(choices[j].size())) pick[j++] = 0;
                            if (j == pick.size()) break;
                        }
                    }
                    if (!done)
                        throw OperationalError("approx_decompose_blowup",
                                               "no closable matching schedule for cluster " + std::to_string(ell));
                }
            }
        } catch (const OperationalError& e) {
            res.trace.push_back(std::string("attempt failed: ") + e.what());
            continue;
        }
        std::vector<char> on_cycle(g.m(), 0);
        for (const auto& c : res.cycles)
            for (EdgeId e : c.edges) on_cycle[e] = 1;
        for (EdgeId e = 0; e < g.m(); ++e)
            if (!on_cycle[e]) res.H.push_back(e);
        for (int i = 0; i < k; ++i) res.gamma.push_back(info[i].gamma);
        std::sort(res.trimmed.begin(), res.trimmed.end());
        return res;
    }
    throw OperationalError("approx_decompose_blowup", "retry budget exhausted");
}

std::string verify_approx_decomposition(const MultiGraph& g, const ClusterPartition& part,
                                        const ApproxDecompResult& res) {
    const int k = part.k(), m = part.m();
    auto cidx = cluster_index(part, g.n());
    if (static_cast<int>(res.cycles.size()) != res.h)
        return "expected " + std::to_string(res.h) + " cycles, got " + std::to_string(res.cycles.size());
    std::vector<int> used(g.m(), 0);
    for (size_t c = 0; c < res.cycles.size(); ++c) {
        const Walk& w = res.cycles[c];
        std::string why = check_walk(g, w);
        if (!why.empty()) return "cycle " + std::to_string(c) + ": " + why;
        if (w.kind != WalkKind::Cycle || w.length() != k * m) return "cycle " + std::to_string(c) + " is not spanning";
        std::vector<std::vector<int>> deg(k, std::vector<int>(g.n(), 0));
        for (EdgeId e : w.edges) {
            ++used[e];
            const Edge& ed = g.edge(e);
            int a = cidx[ed.u], b = cidx[ed.v];
            int pi = (b - a + k) % k == 1 ? a : b;
            ++deg[pi][ed.u];
            ++deg[pi][ed.v];
        }
        for (int i = 0; i < k; ++i) {
            for (Vertex x : part.clusters[i])
                if (deg[i][x] != 1) return "cycle " + std::to_string(c) + " is not a perfect matching on pair " + std::to_string(i);
            for (Vertex x : part.clusters[(i + 1) % k])
                if (deg[i][x] != 1) return "cycle " + std::to_string(c) + " is not a perfect matching on pair " + std::to_string(i);
        }
    }
    for (EdgeId e : res.H) ++used[e];
    for (EdgeId e = 0; e < g.m(); ++e)
        if (used[e] != 1) return "edge " + std::to_string(e) + " covered " + std::to_string(used[e]) + " times";
    std::set<EdgeId> Hs(res.H.begin(), res.H.end());
    for (EdgeId e : res.surgery)
        if (!Hs.count(e)) return "surgery edge outside H";
    std::vector<char> alive(g.m(), 0);
    for (EdgeId e : res.H) alive[e] = 1;
    for (int i = 0; i < k; ++i) {
        auto p = BipartitePair::from_graph(g, part.clusters[i], part.clusters[(i + 1) % k], &alive);
        for (int a = 0; a < m; ++a)
            if (p.degA(a) != res.r || p.degB(a) != res.r)
                return "H is not " + std::to_string(res.r) + "-regular on pair " + std::to_string(i);
    }
    return {};
}

}  // namespace pcd

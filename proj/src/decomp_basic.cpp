#include "pcd/decomp_basic.hpp"

#include "pcd/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace pcd {

namespace {

std::vector<char> all_alive(const MultiGraph& g, const std::vector<char>* alive) {
    return alive ? *alive : std::vector<char>(g.m(), 1);
}

// Split a closed trail (vertex sequence v0..vL=v0, edges e0..e_{L-1}) into cycles at repeated vertices.
void split_closed_trail(const std::vector<Vertex>& vs, const std::vector<EdgeId>& es, const MultiGraph& g,
                        std::vector<Walk>& out) {
    std::vector<Vertex> sv{vs[0]};
    std::vector<EdgeId> se;
    std::map<Vertex, size_t> pos{{vs[0], 0}};
    for (size_t i = 0; i < es.size(); ++i) {
        Vertex nxt = vs[i + 1];
        se.push_back(es[i]);
        auto it = pos.find(nxt);
        if (it != pos.end()) {
            size_t p = it->second;
            std::vector<EdgeId> cyc(se.begin() + static_cast<long>(p), se.end());
            out.push_back(walk_from_edges(g, WalkKind::Cycle, nxt, cyc));
            for (size_t q = p + 1; q < sv.size(); ++q) pos.erase(sv[q]);
            sv.resize(p + 1);
            se.resize(p);
        } else {
            pos[nxt] = sv.size();
            sv.push_back(nxt);
        }
    }
}

}  // namespace

std::vector<Walk> euler_split(const MultiGraph& g, const std::vector<char>* alive) {
    auto live = all_alive(g, alive);
    auto deg = masked_degrees(g, live);
    for (int x = 0; x < g.n(); ++x)
        if (deg[x] % 2) throw std::invalid_argument("euler_split: vertex " + std::to_string(x) + " has odd degree");
    std::vector<size_t> ptr(g.n(), 0);
    std::vector<Walk> out;
    for (int s = 0; s < g.n(); ++s) {
        while (true) {
            // Hierholzer from s using the lowest unused incident edge id
            auto next_edge = [&](Vertex x) -> EdgeId {
                const auto& inc = g.incident(x);
                while (ptr[x] < inc.size() && !live[inc[ptr[x]]]) ++ptr[x];
                return ptr[x] < inc.size() ? inc[ptr[x]] : -1;
            };
            if (next_edge(s) < 0) break;
            std::vector<std::pair<Vertex, EdgeId>> stack{{s, -1}};
            std::vector<Vertex> cv;
            std::vector<EdgeId> ce;
            while (!stack.empty()) {
                Vertex x = stack.back().first;
                EdgeId e = next_edge(x);
                if (e >= 0) {
                    live[e] = 0;
                    stack.emplace_back(g.edge(e).other(x), e);
                } else {
                    cv.push_back(x);
                    if (stack.back().second >= 0) ce.push_back(stack.back().second);
                    stack.pop_back();
                }
            }
            std::reverse(cv.begin(), cv.end());
            std::reverse(ce.begin(), ce.end());
            split_closed_trail(cv, ce, g, out);
        }
    }
    return out;
}

Walk cycle_through_edge(const MultiGraph& g, EdgeId e, const std::vector<char>* alive) {
    auto live = all_alive(g, alive);
    if (e < 0 || e >= g.m() || !live[e]) throw std::invalid_argument("edge not in graph");
    auto deg = masked_degrees(g, live);
    for (int x = 0; x < g.n(); ++x)
        if (deg[x] % 2) throw std::invalid_argument("cycle_through_edge: graph is not Eulerian");
    Vertex u = g.edge(e).u, v = g.edge(e).v;
    live[e] = 0;
    // a trail from v can only get stuck at u
    std::vector<Vertex> tv{v};
    std::vector<EdgeId> te;
    Vertex cur = v;
    while (cur != u) {
        EdgeId nxt = -1;
        for (EdgeId f : g.incident(cur))
            if (live[f]) {
                nxt = f;
                break;
            }
        if (nxt < 0) throw std::logic_error("trail stuck away from the edge endpoint");
        live[nxt] = 0;
        cur = g.edge(nxt).other(cur);
        te.push_back(nxt);
        tv.push_back(cur);
    }
    // loop-erase the trail v..u
    std::vector<Vertex> pv;
    std::vector<EdgeId> pe;
    std::map<Vertex, size_t> pos;
    for (size_t i = 0; i < tv.size(); ++i) {
        auto it = pos.find(tv[i]);
        if (it != pos.end()) {
            size_t p = it->second;
            for (size_t q = p + 1; q < pv.size(); ++q) pos.erase(pv[q]);
            pv.resize(p + 1);
            pe.resize(p);
        } else {
            if (i > 0) pe.push_back(te[i - 1]);
            pos[tv[i]] = pv.size();
            pv.push_back(tv[i]);
        }
    }
    std::vector<EdgeId> cyc{e};
    cyc.insert(cyc.end(), pe.begin(), pe.end());
    return walk_from_edges(g, WalkKind::Cycle, u, cyc);
}

std::optional<std::vector<EdgeId>> bfs_path(const MultiGraph& g, Vertex s, Vertex t, const std::vector<char>& alive,
                                            const std::vector<char>* blocked, int max_len) {
    if (s == t) return std::vector<EdgeId>{};
    std::vector<EdgeId> via(g.n(), -1);
    std::vector<int> dist(g.n(), -1);
    std::deque<Vertex> q{s};
    dist[s] = 0;
    while (!q.empty()) {
        Vertex x = q.front();
        q.pop_front();
        if (max_len >= 0 && dist[x] >= max_len) continue;
        for (EdgeId e : g.incident(x)) {
            if (!alive[e]) continue;
            Vertex y = g.edge(e).other(x);
            if (dist[y] != -1) continue;
            if (y != t && blocked && (*blocked)[y]) continue;
            dist[y] = dist[x] + 1;
            via[y] = e;
            if (y == t) {
                std::vector<EdgeId> path;
                for (Vertex c = t; c != s; c = g.edge(via[c]).other(c)) path.push_back(via[c]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            q.push_back(y);
        }
    }
    return std::nullopt;
}

void improve_locally(const MultiGraph& g, Decomposition& d, int edge_cap) {
    auto& parts = d.parts;
    auto touches = [&](const Walk& a, const Walk& b) {
        for (Vertex x : a.vertices)
            if (std::find(b.vertices.begin(), b.vertices.end(), x) != b.vertices.end()) return true;
        return false;
    };
    auto try_union = [&](const std::vector<size_t>& idx) -> bool {
        std::vector<EdgeId> ids;
        int old_paths = 0;
        for (size_t i : idx) {
            ids.insert(ids.end(), parts[i].edges.begin(), parts[i].edges.end());
            old_paths += parts[i].kind == WalkKind::Path;
        }
        if (static_cast<int>(ids.size()) > edge_cap) return false;
        std::vector<EdgeId> origin;
        MultiGraph sub = g.edge_subgraph(ids, &origin);
        auto best = min_path_cycle_count(sub, edge_cap);
        if (best.count >= static_cast<int>(idx.size())) return false;
        int new_paths = 0;
        for (const auto& w : best.witness.parts) new_paths += w.kind == WalkKind::Path;
        if (new_paths != old_paths) return false;
        std::vector<Walk> keep;
        for (size_t i = 0; i < parts.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(parts[i]);
        for (const auto& w : best.witness.parts) {
            std::vector<EdgeId> es;
            for (EdgeId e : w.edges) es.push_back(origin[e]);
            keep.push_back(walk_from_edges(g, w.kind, w.vertices.front(), es));
        }
        parts = std::move(keep);
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        const size_t P = parts.size();
        for (size_t i = 0; i < P && !changed; ++i)
            for (size_t j = i + 1; j < P && !changed; ++j)
                if (touches(parts[i], parts[j]) && try_union({i, j})) changed = true;
        if (changed || P > kLocalTripleLimit) continue;
        for (size_t i = 0; i < P && !changed; ++i)
            for (size_t j = i + 1; j < P && !changed; ++j)
                for (size_t l = j + 1; l < P && !changed; ++l) {
                    int links = touches(parts[i], parts[j]) + touches(parts[i], parts[l]) + touches(parts[j], parts[l]);
                    if (links >= 2 && try_union({i, j, l})) changed = true;
                }
    }
}

GreedyResult greedy_path_cycle_decomposition(const MultiGraph& g) {
    GreedyResult res;
    std::vector<char> live(g.m(), 1);
    auto deg = masked_degrees(g, live);
    std::set<Vertex> odd;
    for (int x = 0; x < g.n(); ++x)
        if (deg[x] % 2) odd.insert(x);
    while (!odd.empty()) {
        // closest pair of odd vertices, ties by lowest (x, y)
        int best = -1;
        Vertex bx = -1, by = -1;
        std::vector<EdgeId> bpath;
        for (Vertex x : odd) {
            std::vector<int> dist(g.n(), -1);
            std::vector<EdgeId> via(g.n(), -1);
            std::deque<Vertex> q{x};
            dist[x] = 0;
            while (!q.empty()) {
                Vertex a = q.front();
                q.pop_front();
                if (best >= 0 && dist[a] >= best) break;
                for (EdgeId e : g.incident(a)) {
                    if (!live[e]) continue;
                    Vertex b = g.edge(e).other(a);
                    if (dist[b] != -1) continue;
                    dist[b] = dist[a] + 1;
                    via[b] = e;
                    q.push_back(b);
                }
            }
            for (Vertex y : odd) {
                if (y <= x || dist[y] < 0) continue;
                if (best < 0 || dist[y] < best) {
                    best = dist[y];
                    bx = x;
                    by = y;
                    bpath.clear();
                    for (Vertex c = y; c != x; c = g.edge(via[c]).other(c)) bpath.push_back(via[c]);
                    std::reverse(bpath.begin(), bpath.end());
                }
            }
        }
        if (best < 0) throw std::logic_error("odd vertices left without a partner in their component");
        for (EdgeId e : bpath) live[e] = 0;
        res.decomposition.parts.push_back(walk_from_edges(g, WalkKind::Path, bx, bpath));
        odd.erase(bx);
        odd.erase(by);
    }
    for (auto& c : euler_split(g, &live)) res.decomposition.parts.push_back(std::move(c));
    improve_locally(g, res.decomposition);
    res.within_lovasz_bound = static_cast<int>(res.decomposition.parts.size()) <= g.n() / 2;
    return res;
}

namespace {

// Multi-fan recolouring. Invariant: `at[v][c]` is the edge of colour c at v or -1.
class VizingColorer {
public:
    VizingColorer(const MultiGraph& g, int k) : g_(g), k_(k), color_(g.m(), -1), at_(g.n(), std::vector<int>(k, -1)) {}

    void run() {
        for (EdgeId e = 0; e < g_.m(); ++e) color_edge(e);
    }
    const std::vector<int>& colors() const { return color_; }

private:
    bool missing(Vertex v, int c) const { return at_[v][c] < 0; }
    int first_missing(Vertex v) const {
        for (int c = 0; c < k_; ++c)
            if (missing(v, c)) return c;
        return -1;
    }
    int common_missing(Vertex a, Vertex b) const {
        for (int c = 0; c < k_; ++c)
            if (missing(a, c) && missing(b, c)) return c;
        return -1;
    }
    void set(EdgeId e, int c) {
        const Edge& ed = g_.edge(e);
        color_[e] = c;
        at_[ed.u][c] = e;
        at_[ed.v][c] = e;
    }
    void unset(EdgeId e) {
        int c = color_[e];
        if (c < 0) return;
        const Edge& ed = g_.edge(e);
        at_[ed.u][c] = -1;
        at_[ed.v][c] = -1;
        color_[e] = -1;
    }
    // Other endpoint of the (a,b)-chain starting at v.
    Vertex chain_end(Vertex v, int a, int b) const {
        Vertex cur = v;
        int want = missing(v, a) ? b : a;
        EdgeId prev = -1;
        while (true) {
            EdgeId e = at_[cur][want];
            if (e < 0 || e == prev) return cur;
            cur = g_.edge(e).other(cur);
            prev = e;
            want = (want == a) ? b : a;
        }
    }
    void swap_chain(Vertex v, int a, int b) {
        std::vector<EdgeId> chain;
        Vertex cur = v;
        int want = missing(v, a) ? b : a;
        EdgeId prev = -1;
        while (true) {
            EdgeId e = at_[cur][want];
            if (e < 0 || e == prev) break;
            chain.push_back(e);
            cur = g_.edge(e).other(cur);
            prev = e;
            want = (want == a) ? b : a;
        }
        std::vector<int> old;
        for (EdgeId e : chain) {
            old.push_back(color_[e]);
            unset(e);
        }
        for (size_t i = 0; i < chain.size(); ++i) set(chain[i], old[i] == a ? b : a);
    }

    void color_edge(EdgeId e0) {
        Vertex x = g_.edge(e0).u, y0 = g_.edge(e0).v;
        int alpha = common_missing(x, y0);
        if (alpha >= 0) {
            set(e0, alpha);
            return;
        }
        std::vector<EdgeId> fe{e0};
        std::vector<Vertex> fy{y0};
        std::vector<int> parent{-1};
        std::vector<char> in_fan(g_.m(), 0);
        in_fan[e0] = 1;
        std::map<Vertex, int> first_pos{{y0, 0}};
        while (true) {
            // extend the multi-fan by the first eligible edge at x
            int add_pos = -1;
            EdgeId add_edge = -1;
            for (size_t j = 0; j < fy.size() && add_edge < 0; ++j) {
                if (first_pos.at(fy[j]) != static_cast<int>(j)) continue;
                for (int c = 0; c < k_; ++c) {
                    if (!missing(fy[j], c)) continue;
                    EdgeId f = at_[x][c];
                    if (f < 0 || in_fan[f]) continue;
                    add_edge = f;
                    add_pos = static_cast<int>(j);
                    break;
                }
            }
            if (add_edge < 0)
                throw std::logic_error("maximal multi-fan is elementary; palette below Delta + mu");
            Vertex y = g_.edge(add_edge).other(x);
            fe.push_back(add_edge);
            fy.push_back(y);
            parent.push_back(add_pos);
            in_fan[add_edge] = 1;
            int p = static_cast<int>(fe.size()) - 1;
            if (first_pos.count(y)) continue;
            first_pos[y] = p;
            alpha = common_missing(x, y);
            if (alpha >= 0) {
                shift_and_color(fe, parent, p, alpha);
                return;
            }
            // a colour beta missing at y and at an earlier fan vertex
            for (int beta = 0; beta < k_; ++beta) {
                if (!missing(y, beta)) continue;
                for (auto [yj, j] : first_pos) {
                    if (yj == y || !missing(yj, beta)) continue;
                    int a = first_missing(x);
                    Vertex end = chain_end(x, a, beta);
                    if (end != yj) {
                        swap_chain(yj, a, beta);
                        shift_and_color(fe, parent, j, a);
                    } else {
                        swap_chain(y, a, beta);
                        shift_and_color(fe, parent, p, a);
                    }
                    return;
                }
            }
        }
    }

    // Move colours down the parent chain from fan position q to 0, then colour fan edge q with alpha.
    void shift_and_color(const std::vector<EdgeId>& fe, const std::vector<int>& parent, int q, int alpha) {
        std::vector<int> chain;
        for (int t = q; t != -1; t = parent[t]) chain.push_back(t);
        std::vector<int> old;
        for (int t : chain) old.push_back(color_[fe[t]]);
        for (int t : chain) unset(fe[t]);
        for (size_t i = 1; i < chain.size(); ++i) set(fe[chain[i]], old[i - 1]);
        set(fe[q], alpha);
    }

    const MultiGraph& g_;
    int k_;
    std::vector<int> color_;
    std::vector<std::vector<int>> at_;
};

}  // namespace

EdgeColoring vizing_color(const MultiGraph& g) {
    EdgeColoring out;
    auto st = degree_stats(g);
    int mu = g.m() ? g.max_multiplicity() : 0;
    out.bound = st.max_degree + mu;
    if (g.m() == 0) return out;
    VizingColorer vc(g, out.bound);
    vc.run();
    out.color = vc.colors();
    // compact the palette so colours are 0..palette-1 in order of first use
    std::map<int, int> remap;
    for (int& c : out.color) {
        auto it = remap.find(c);
        if (it == remap.end()) it = remap.emplace(c, static_cast<int>(remap.size())).first;
        c = it->second;
    }
    out.palette = static_cast<int>(remap.size());
    return out;
}

bool is_proper_coloring(const MultiGraph& g, const EdgeColoring& c) {
    if (static_cast<int>(c.color.size()) != g.m()) return false;
    for (int x = 0; x < g.n(); ++x) {
        std::set<int> seen;
        for (EdgeId e : g.incident(x)) {
            if (c.color[e] < 0 || c.color[e] >= c.palette) return false;
            if (!seen.insert(c.color[e]).second) return false;
        }
    }
    return true;
}

std::vector<std::vector<EdgeId>> color_classes(const EdgeColoring& c) {
    std::vector<std::vector<EdgeId>> cls(c.palette);
    for (EdgeId e = 0; e < static_cast<EdgeId>(c.color.size()); ++e) cls[c.color[e]].push_back(e);
    return cls;
}

bool is_matching(const MultiGraph& g, const std::vector<EdgeId>& edges) {
    std::set<Vertex> seen;
    for (EdgeId e : edges)
        if (!seen.insert(g.edge(e).u).second || !seen.insert(g.edge(e).v).second) return false;
    return true;
}

std::pair<EdgeId, EdgeId> vertex_disjoint_pair_from_odd_classes(const MultiGraph& g, const std::vector<EdgeId>& Mi,
                                                                const std::vector<EdgeId>& Mj) {
    if (Mi.empty() || Mj.empty() || Mi.size() % 2 == 0 || Mj.size() % 2 == 0)
        throw std::invalid_argument("both classes must have odd size");
    if (Mi.size() == 1 && Mj.size() == 1) throw std::invalid_argument("at most one class may have size 1");
    for (EdgeId a : Mi)
        for (EdgeId b : Mj) {
            const Edge &ea = g.edge(a), &eb = g.edge(b);
            if (ea.u != eb.u && ea.u != eb.v && ea.v != eb.u && ea.v != eb.v) return {a, b};
        }
    throw std::logic_error("no vertex-disjoint pair in two odd matchings");
}

MatchingBundle even_matching_decomposition(const MultiGraph& g) {
    if (g.m() % 2) throw std::invalid_argument("even_matching_decomposition needs an even number of edges");
    MatchingBundle b;
    auto st = degree_stats(g);
    int mu = g.m() ? g.max_multiplicity() : 0;
    int bound = st.max_degree + mu;
    b.matching_cap = (3 * bound + 1) / 2;
    b.short_cap = (bound + 1) / 2;
    if (g.m() == 0) return b;
    auto classes = color_classes(vizing_color(g));
    // merge classes whose union is still a matching, so any two size-1 classes meet
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t i = 0; i < classes.size() && !merged; ++i)
            for (size_t j = i + 1; j < classes.size() && !merged; ++j) {
                std::vector<EdgeId> u = classes[i];
                u.insert(u.end(), classes[j].begin(), classes[j].end());
                if (is_matching(g, u)) {
                    std::sort(u.begin(), u.end());
                    classes[i] = u;
                    classes.erase(classes.begin() + static_cast<long>(j));
                    merged = true;
                }
            }
    }
    std::vector<size_t> S, T;
    for (size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].size() == 1)
            S.push_back(i);
        else if (classes[i].size() % 2)
            T.push_back(i);
        else
            b.even_matchings.push_back(classes[i]);
    }
    if (S.size() % 2) {
        T.push_back(S.back());
        S.pop_back();
    }
    for (size_t t = 0; t + 1 < S.size(); t += 2) {
        EdgeId e1 = classes[S[t]][0], e2 = classes[S[t + 1]][0];
        const Edge &a = g.edge(e1), &c = g.edge(e2);
        bool parallel = std::minmax(a.u, a.v) == std::minmax(c.u, c.v);
        if (parallel) {
            b.short_parts.push_back(walk_from_edges(g, WalkKind::Cycle, a.u, {e1, e2}));
        } else {
            Vertex mid = (a.u == c.u || a.u == c.v) ? a.u : a.v;
            b.short_parts.push_back(walk_from_edges(g, WalkKind::Path, a.other(mid), {e1, e2}));
        }
    }
    for (size_t t = 0; t + 1 < T.size(); t += 2) {
        auto& Mi = classes[T[t]];
        auto& Mj = classes[T[t + 1]];
        auto [ei, ej] = vertex_disjoint_pair_from_odd_classes(g, Mi, Mj);
        std::vector<EdgeId> ri, rj;
        for (EdgeId e : Mi)
            if (e != ei) ri.push_back(e);
        for (EdgeId e : Mj)
            if (e != ej) rj.push_back(e);
        if (!ri.empty()) b.even_matchings.push_back(ri);
        if (!rj.empty()) b.even_matchings.push_back(rj);
        b.even_matchings.push_back({std::min(ei, ej), std::max(ei, ej)});
    }
    return b;
}

std::string check_matching_bundle(const MultiGraph& g, const MatchingBundle& b) {
    std::vector<int> used(g.m(), 0);
    for (const auto& M : b.even_matchings) {
        if (M.empty() || M.size() % 2) return "matching of odd or zero size";
        if (!is_matching(g, M)) return "class is not a matching";
        for (EdgeId e : M) ++used[e];
    }
    for (const auto& w : b.short_parts) {
        std::string why = check_walk(g, w);
        if (!why.empty()) return "short part: " + why;
        if (w.length() != 2) return "short part of length != 2";
        for (EdgeId e : w.edges) ++used[e];
    }
    for (EdgeId e = 0; e < g.m(); ++e)
        if (used[e] != 1) return "edge " + std::to_string(e) + " covered " + std::to_string(used[e]) + " times";
    if (static_cast<int>(b.even_matchings.size()) > b.matching_cap) return "too many matchings";
    if (static_cast<int>(b.short_parts.size()) > b.short_cap) return "too many short parts";
    return {};
}

}  // namespace pcd

#include "pcd/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace pcd {

MultiGraph::MultiGraph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), adj_(n) {
    if (n < 0) throw std::invalid_argument("negative vertex count");
    edges_.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("vertex out of range in edge " + std::to_string(u) + " " + std::to_string(v));
        if (u == v) throw std::invalid_argument("loop at vertex " + std::to_string(u));
        EdgeId id = static_cast<EdgeId>(edges_.size());
        edges_.push_back({id, u, v});
        adj_[u].push_back(id);
        adj_[v].push_back(id);
    }
}

int MultiGraph::max_multiplicity() const {
    std::map<std::pair<int, int>, int> count;
    int best = 0;
    for (const auto& e : edges_) {
        auto key = std::minmax(e.u, e.v);
        best = std::max(best, ++count[{key.first, key.second}]);
    }
    return best;
}

int MultiGraph::multiplicity(Vertex x, Vertex y) const {
    int c = 0;
    for (EdgeId e : adj_.at(x))
        if (edges_[e].other(x) == y) ++c;
    return c;
}

std::vector<std::pair<int, int>> MultiGraph::edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.emplace_back(e.u, e.v);
    return out;
}

bool MultiGraph::adjacency_consistent() const {
    std::vector<int> seen(edges_.size(), 0);
    for (int x = 0; x < n_; ++x)
        for (EdgeId e : adj_[x]) {
            if (e < 0 || e >= m() || (edges_[e].u != x && edges_[e].v != x)) return false;
            ++seen[e];
        }
    for (int c : seen)
        if (c != 2) return false;
    for (int i = 0; i < m(); ++i)
        if (edges_[i].id != i) return false;
    return true;
}

MultiGraph MultiGraph::edge_subgraph(const std::vector<EdgeId>& ids, std::vector<EdgeId>* origin) const {
    std::vector<std::pair<int, int>> el;
    el.reserve(ids.size());
    for (EdgeId e : ids) el.emplace_back(edges_.at(e).u, edges_.at(e).v);
    if (origin) *origin = ids;
    return MultiGraph(n_, el);
}

DegreeStats degree_stats(const MultiGraph& g) {
    DegreeStats s;
    if (g.n() == 0) return s;
    s.max_degree = 0;
    s.min_degree = g.degree(0);
    for (int x = 0; x < g.n(); ++x) {
        int d = g.degree(x);
        s.max_degree = std::max(s.max_degree, d);
        s.min_degree = std::min(s.min_degree, d);
        if (d % 2) s.odd.push_back(x);
    }
    return s;
}

std::vector<int> masked_degrees(const MultiGraph& g, const std::vector<char>& alive) {
    std::vector<int> d(g.n(), 0);
    for (const auto& e : g.edges())
        if (alive[e.id]) {
            ++d[e.u];
            ++d[e.v];
        }
    return d;
}

Walk walk_from_edges(const MultiGraph& g, WalkKind kind, Vertex start, const std::vector<EdgeId>& edges) {
    Walk w;
    w.kind = kind;
    w.edges = edges;
    w.vertices.push_back(start);
    Vertex cur = start;
    for (EdgeId e : edges) {
        const Edge& ed = g.edge(e);
        if (ed.u != cur && ed.v != cur)
            throw std::logic_error("edge " + std::to_string(e) + " does not continue walk at " + std::to_string(cur));
        cur = ed.other(cur);
        w.vertices.push_back(cur);
    }
    return w;
}

std::string check_walk(const MultiGraph& g, const Walk& w) {
    if (w.edges.empty()) return "empty walk";
    if (w.vertices.size() != w.edges.size() + 1) return "vertex sequence length mismatch";
    std::set<EdgeId> used;
    for (size_t i = 0; i < w.edges.size(); ++i) {
        EdgeId e = w.edges[i];
        if (e < 0 || e >= g.m()) return "edge id " + std::to_string(e) + " out of range";
        if (!used.insert(e).second) return "edge " + std::to_string(e) + " repeated in walk";
        const Edge& ed = g.edge(e);
        Vertex a = w.vertices[i], b = w.vertices[i + 1];
        if (!((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)))
            return "edge " + std::to_string(e) + " does not join " + std::to_string(a) + " and " + std::to_string(b);
    }
    std::set<Vertex> vs;
    size_t limit = w.vertices.size();
    if (w.kind == WalkKind::Cycle) {
        if (w.vertices.front() != w.vertices.back()) return "cycle does not close";
        limit -= 1;
    }
    for (size_t i = 0; i < limit; ++i)
        if (!vs.insert(w.vertices[i]).second) return "vertex " + std::to_string(w.vertices[i]) + " repeated";
    return {};
}

Walk reversed(const Walk& w) {
    Walk r = w;
    std::reverse(r.edges.begin(), r.edges.end());
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
}

VerifyReport verify_decomposition(const MultiGraph& g, const Decomposition& d) {
    VerifyReport rep;
    std::vector<int> owner(g.m(), -1);
    auto fail = [&](const std::string& msg) {
        if (rep.valid) {
            rep.valid = false;
            rep.violation = msg;
        }
    };
    for (size_t i = 0; i < d.parts.size(); ++i) {
        const Walk& w = d.parts[i];
        if (w.kind == WalkKind::Path)
            ++rep.paths;
        else
            ++rep.cycles;
        std::string why = check_walk(g, w);
        if (!why.empty()) {
            fail("part " + std::to_string(i) + ": " + why);
            continue;
        }
        for (EdgeId e : w.edges) {
            if (owner[e] != -1) fail("edge " + std::to_string(e) + " used twice");
            owner[e] = static_cast<int>(i);
        }
    }
    for (EdgeId e : d.leftover) {
        ++rep.leftover;
        if (e < 0 || e >= g.m()) {
            fail("leftover edge id " + std::to_string(e) + " out of range");
            continue;
        }
        if (owner[e] != -1) fail("edge " + std::to_string(e) + " used twice");
        owner[e] = -2;
    }
    for (EdgeId e = 0; e < g.m(); ++e)
        if (owner[e] == -1) {
            fail("edge " + std::to_string(e) + " not covered");
            break;
        }
    return rep;
}

bool is_linear_forest(const MultiGraph& g, const LinearForest& f, std::string* why) {
    std::set<Vertex> seen;
    for (const auto& p : f.paths) {
        std::string w = check_walk(g, p);
        if (w.empty() && p.kind != WalkKind::Path) w = "not a path";
        if (w.empty())
            for (Vertex x : p.vertices)
                if (!seen.insert(x).second) {
                    w = "paths share vertex " + std::to_string(x);
                    break;
                }
        if (!w.empty()) {
            if (why) *why = w;
            return false;
        }
    }
    return true;
}

std::vector<int> cluster_index(const ClusterPartition& p, int n) {
    std::vector<int> idx(n, -3);
    auto put = [&](Vertex x, int c) {
        if (x < 0 || x >= n) throw std::invalid_argument("partition vertex " + std::to_string(x) + " out of range");
        if (idx[x] != -3) throw std::invalid_argument("vertex " + std::to_string(x) + " in two parts");
        idx[x] = c;
    };
    for (Vertex x : p.V0) put(x, -1);
    for (int i = 0; i < p.k(); ++i)
        for (Vertex x : p.clusters[i]) put(x, i);
    for (int x = 0; x < n; ++x)
        if (idx[x] == -3) throw std::invalid_argument("vertex " + std::to_string(x) + " not in partition");
    return idx;
}

std::string check_partition(const ClusterPartition& p, int n) {
    try {
        cluster_index(p, n);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

void derive_support(const MultiGraph& g, ClusterPartition& p, const std::vector<char>* alive) {
    auto idx = cluster_index(p, g.n());
    std::map<std::pair<int, int>, std::set<Vertex>> sup;
    for (const auto& e : g.edges()) {
        if (alive && !(*alive)[e.id]) continue;
        int a = idx[e.u], b = idx[e.v];
        if (a < 0 || b < 0 || a == b) continue;
        sup[{a, b}].insert(e.u);
        sup[{b, a}].insert(e.v);
    }
    p.support.clear();
    for (auto& [key, s] : sup) p.support[key] = std::vector<Vertex>(s.begin(), s.end());
}

std::vector<std::vector<int>> reduced_counts(const MultiGraph& g, const ClusterPartition& p,
                                             const std::vector<char>* alive) {
    auto idx = cluster_index(p, g.n());
    std::vector<std::vector<int>> c(p.k(), std::vector<int>(p.k(), 0));
    for (const auto& e : g.edges()) {
        if (alive && !(*alive)[e.id]) continue;
        int a = idx[e.u], b = idx[e.v];
        if (a < 0 || b < 0 || a == b) continue;
        ++c[a][b];
        ++c[b][a];
    }
    return c;
}

std::vector<int> reduced_components(const std::vector<std::vector<int>>& counts) {
    int k = static_cast<int>(counts.size());
    std::vector<int> comp(k, -1);
    int label = 0;
    for (int s = 0; s < k; ++s) {
        if (comp[s] != -1) continue;
        std::vector<int> stack{s};
        comp[s] = label;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (int b = 0; b < k; ++b)
                if (counts[a][b] > 0 && comp[b] == -1) {
                    comp[b] = label;
                    stack.push_back(b);
                }
        }
        ++label;
    }
    return comp;
}

std::vector<std::vector<Vertex>> connected_components(const MultiGraph& g, const std::vector<char>* alive) {
    std::vector<int> comp(g.n(), -1);
    std::vector<std::vector<Vertex>> out;
    for (int s = 0; s < g.n(); ++s) {
        if (comp[s] != -1) continue;
        out.emplace_back();
        std::vector<int> stack{s};
        comp[s] = static_cast<int>(out.size()) - 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            out.back().push_back(x);
            for (EdgeId e : g.incident(x)) {
                if (alive && !(*alive)[e]) continue;
                int y = g.edge(e).other(x);
                if (comp[y] == -1) {
                    comp[y] = comp[s];
                    stack.push_back(y);
                }
            }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

}  // namespace pcd

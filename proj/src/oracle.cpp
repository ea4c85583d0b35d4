#include "pcd/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace pcd {

namespace {

using Mask = std::uint32_t;

struct Part {
    Mask mask;
    WalkKind kind;
    Vertex start;
    std::vector<EdgeId> edges;
};

class Search {
public:
    Search(const MultiGraph& g, PartKinds kinds) : g_(g), kinds_(kinds) {}

    // (parts, paths), lexicographic; parts is the objective, fewer paths breaks ties
    using Score = std::pair<int, int>;
    static constexpr Score kNone{INT32_MAX, INT32_MAX};

    Score solve(Mask rem) {
        if (rem == 0) return {0, 0};
        auto it = memo_.find(rem);
        if (it != memo_.end()) return it->second.first;
        auto [lb, odd_half] = lower_bound(rem);
        auto parts = parts_with_lowest(rem);
        // larger parts first tends to find the optimum early
        std::stable_sort(parts.begin(), parts.end(),
                         [](const Part& a, const Part& b) { return a.edges.size() > b.edges.size(); });
        Score best = kNone;
        int best_idx = -1;
        for (size_t i = 0; i < parts.size(); ++i) {
            Score sub = solve(rem & ~parts[i].mask);
            if (sub == kNone) continue;
            Score cand{sub.first + 1, sub.second + (parts[i].kind == WalkKind::Path ? 1 : 0)};
            if (cand < best) {
                best = cand;
                best_idx = static_cast<int>(i);
                if (best.first <= lb && best.second <= odd_half) break;
            }
        }
        Part choice{};
        if (best_idx >= 0) choice = parts[best_idx];
        memo_[rem] = {best, choice};
        return best;
    }

    Decomposition witness(Mask rem) const {
        Decomposition d;
        while (rem) {
            const Part& p = memo_.at(rem).second;
            d.parts.push_back(walk_from_edges(g_, p.kind, p.start, p.edges));
            rem &= ~p.mask;
        }
        return d;
    }
    std::int64_t states() const { return static_cast<std::int64_t>(memo_.size()); }

private:
    std::pair<int, int> lower_bound(Mask rem) const {
        std::vector<int> deg(g_.n(), 0);
        for (int e = 0; e < g_.m(); ++e)
            if (rem >> e & 1) {
                ++deg[g_.edge(e).u];
                ++deg[g_.edge(e).v];
            }
        int odd = 0;
        for (int x : deg) odd += x % 2;
        return {std::max(1, odd / 2), odd / 2};
    }

    // Every path or cycle inside rem that contains the lowest edge e = uv, traversed u -> v first.
    std::vector<Part> parts_with_lowest(Mask rem) const {
        std::vector<Part> out;
        int e0 = __builtin_ctz(rem);
        Vertex u = g_.edge(e0).u, v = g_.edge(e0).v;
        std::vector<char> on(g_.n(), 0);
        on[u] = on[v] = 1;
        std::vector<EdgeId> fwd{e0};
        Mask used = Mask{1} << e0;
        forward(rem, u, v, used, on, fwd, out);
        return out;
    }

    void forward(Mask rem, Vertex u, Vertex end, Mask used, std::vector<char>& on, std::vector<EdgeId>& fwd,
                 std::vector<Part>& out) const {
        if (kinds_ != PartKinds::CyclesOnly) {
            // fix the forward part, grow backwards from u
            std::vector<EdgeId> back;
            backward(rem, u, end, used, on, fwd, back, out);
        }
        for (EdgeId f : g_.incident(end)) {
            if (!(rem >> f & 1) || (used >> f & 1)) continue;
            Vertex y = g_.edge(f).other(end);
            if (y == u) {
                if (kinds_ != PartKinds::PathsOnly) {
                    auto es = fwd;
                    es.push_back(f);
                    out.push_back({used | Mask{1} << f, WalkKind::Cycle, u, es});
                }
                continue;
            }
            if (on[y]) continue;
            on[y] = 1;
            fwd.push_back(f);
            forward(rem, u, y, used | Mask{1} << f, on, fwd, out);
            fwd.pop_back();
            on[y] = 0;
        }
    }

    void backward(Mask rem, Vertex s, Vertex end, Mask used, std::vector<char>& on, const std::vector<EdgeId>& fwd,
                  std::vector<EdgeId>& back, std::vector<Part>& out) const {
        // path = reverse(back) + fwd, starting at s
        std::vector<EdgeId> es(back.rbegin(), back.rend());
        es.insert(es.end(), fwd.begin(), fwd.end());
        out.push_back({used, WalkKind::Path, s, es});
        for (EdgeId f : g_.incident(s)) {
            if (!(rem >> f & 1) || (used >> f & 1)) continue;
            Vertex y = g_.edge(f).other(s);
            if (on[y]) continue;
            on[y] = 1;
            back.push_back(f);
            backward(rem, y, end, used | Mask{1} << f, on, fwd, back, out);
            back.pop_back();
            on[y] = 0;
        }
    }

    const MultiGraph& g_;
    PartKinds kinds_;
    std::unordered_map<Mask, std::pair<Score, Part>> memo_;
};

}  // namespace

bool is_connected(const MultiGraph& g) {
    return connected_components(g).size() <= 1;
}

OracleResult min_decomposition(const MultiGraph& g, PartKinds kinds, int edge_cap) {
    if (g.m() > edge_cap || g.m() > 31)
        throw std::invalid_argument("oracle: " + std::to_string(g.m()) + " edges exceeds cap " + std::to_string(edge_cap));
    if (kinds == PartKinds::CyclesOnly && !degree_stats(g).eulerian())
        throw std::invalid_argument("oracle: graph is not Eulerian");
    if (kinds == PartKinds::PathsOnly && !is_connected(g))
        throw std::invalid_argument("oracle: graph is disconnected; run per component");
    Search s(g, kinds);
    Mask all = g.m() == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << g.m()) - 1);
    OracleResult r;
    r.count = s.solve(all).first;
    if (r.count == INT32_MAX) throw std::logic_error("oracle: no decomposition of the requested kind");
    r.witness = s.witness(all);
    r.states = s.states();
    return r;
}

OracleResult min_path_cycle_count(const MultiGraph& g, int edge_cap) {
    return min_decomposition(g, PartKinds::PathsAndCycles, edge_cap);
}
OracleResult min_cycle_count(const MultiGraph& g, int edge_cap) {
    return min_decomposition(g, PartKinds::CyclesOnly, edge_cap);
}
OracleResult min_path_count(const MultiGraph& g, int edge_cap) {
    return min_decomposition(g, PartKinds::PathsOnly, edge_cap);
}

std::vector<MultiGraph> nonisomorphic_graphs(int n) {
    if (n < 0 || n > 7) throw std::invalid_argument("nonisomorphic_graphs: n must be in [0, 7]");
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> idx(n, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            idx[i][j] = idx[j][i] = static_cast<int>(pairs.size());
            pairs.emplace_back(i, j);
        }
    const int P = static_cast<int>(pairs.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> maps;  // pair index -> pair index under each permutation
    do {
        std::vector<int> mp(P);
        for (int k = 0; k < P; ++k) mp[k] = idx[perm[pairs[k].first]][perm[pairs[k].second]];
        maps.push_back(std::move(mp));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const std::uint64_t total = std::uint64_t{1} << P;
    std::vector<char> seen(total, 0);
    std::vector<MultiGraph> out;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (seen[mask]) continue;
        for (const auto& mp : maps) {
            std::uint64_t img = 0;
            for (int k = 0; k < P; ++k)
                if (mask >> k & 1) img |= std::uint64_t{1} << mp[k];
            seen[img] = 1;
        }
        std::vector<std::pair<int, int>> es;
        for (int k = 0; k < P; ++k)
            if (mask >> k & 1) es.push_back(pairs[k]);
        out.emplace_back(n, es);
    }
    return out;
}

int chromatic_index_bruteforce(const MultiGraph& g) {
    if (g.m() == 0) return 0;
    int lo = degree_stats(g).max_degree;
    std::vector<int> col(g.m(), -1);
    for (int k = lo;; ++k) {
        std::fill(col.begin(), col.end(), -1);
        auto ok = [&](auto&& self, int e) -> bool {
            if (e == g.m()) return true;
            for (int c = 0; c < k; ++c) {
                bool clash = false;
                for (Vertex x : {g.edge(e).u, g.edge(e).v})
                    for (EdgeId f : g.incident(x))
                        if (f < e && col[f] == c) clash = true;
                if (clash) continue;
                col[e] = c;
                if (self(self, e + 1)) return true;
            }
            col[e] = -1;
            return false;
        };
        if (ok(ok, 0)) return k;
    }
}

namespace {

template <class Applies, class Count, class Bound>
TheoremAudit run_audit(std::string name, std::string bound, int max_n, Applies applies, Count count, Bound value) {
    TheoremAudit a{std::move(name), std::move(bound), max_n};
    a.worst_slack = INT32_MAX;
    for (int n = 1; n <= max_n; ++n)
        for (const auto& g : nonisomorphic_graphs(n)) {
            if (!applies(g)) continue;
            ++a.graphs;
            int c = count(g);
            int slack = value(n) - c;
            a.worst_slack = std::min(a.worst_slack, slack);
            if (slack < 0) ++a.violations;
            if (a.name == "cycles" && c > (n - 1) / 2) ++a.strict_violations;
        }
    if (a.graphs == 0) a.worst_slack = 0;
    return a;
}

}  // namespace

TheoremAudit audit_path_cycle_bound(int max_n) {
    return run_audit(
        "paths_and_cycles", "floor(n/2)", max_n, [](const MultiGraph&) { return true; },
        [](const MultiGraph& g) { return g.m() == 0 ? 0 : min_path_cycle_count(g).count; }, [](int n) { return n / 2; });
}

TheoremAudit audit_cycle_bound(int max_n) {
    return run_audit(
        "cycles", "floor(n/2)", max_n, [](const MultiGraph& g) { return degree_stats(g).eulerian(); },
        [](const MultiGraph& g) { return g.m() == 0 ? 0 : min_cycle_count(g).count; }, [](int n) { return n / 2; });
}

TheoremAudit audit_path_bound(int max_n) {
    return run_audit(
        "paths", "ceil(n/2)", max_n, [](const MultiGraph& g) { return g.m() > 0 && is_connected(g); },
        [](const MultiGraph& g) { return min_path_count(g).count; }, [](int n) { return (n + 1) / 2; });
}

}  // namespace pcd

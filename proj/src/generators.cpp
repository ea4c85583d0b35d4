#include "pcd/generators.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace pcd {

MultiGraph complete_graph(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.emplace_back(i, j);
    return MultiGraph(n, es);
}

MultiGraph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i) es.emplace_back(i, (i + 1) % n);
    return MultiGraph(n, es);
}

MultiGraph path_graph(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
    return MultiGraph(n, es);
}

MultiGraph complete_bipartite(int a, int b) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) es.emplace_back(i, a + j);
    return MultiGraph(a + b, es);
}

MultiGraph gnp(int n, const Rational& p, Rng& rng) {
    if (n < 0) throw std::invalid_argument("gnp: n < 0");
    if (p < 0 || p > 1) throw std::invalid_argument("gnp: p outside [0, 1]");
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) es.emplace_back(i, j);
    return MultiGraph(n, es);
}

MultiGraph random_multigraph(int n, int m, int max_mult, Rng& rng) {
    if (n < 2 || max_mult < 1) throw std::invalid_argument("random_multigraph: need n >= 2, max_mult >= 1");
    if (static_cast<long>(m) > static_cast<long>(n) * (n - 1) / 2 * max_mult)
        throw std::invalid_argument("random_multigraph: too many edges");
    std::map<std::pair<int, int>, int> mult;
    std::vector<std::pair<int, int>> es;
    while (static_cast<int>(es.size()) < m) {
        int u = static_cast<int>(rng.below(n)), v = static_cast<int>(rng.below(n));
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (mult[key] >= max_mult) continue;
        ++mult[key];
        es.emplace_back(key.first, key.second);
    }
    return MultiGraph(n, es);
}

std::vector<std::pair<int, int>> random_bipartite(int mA, int mB, const Rational& p, Rng& rng) {
    std::vector<std::pair<int, int>> es;
    for (int a = 0; a < mA; ++a)
        for (int b = 0; b < mB; ++b)
            if (rng.bernoulli(p)) es.emplace_back(a, b);
    return es;
}

std::vector<std::pair<int, int>> random_regular_bipartite(int m, int r, Rng& rng) {
    if (r < 0 || r > m) throw std::invalid_argument("random_regular_bipartite: need 0 <= r <= m");
    std::vector<std::pair<int, int>> es;
    std::set<std::pair<int, int>> present;
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < r; ++j) {
            es.emplace_back(a, (a + j) % m);
            present.insert(es.back());
        }
    if (es.empty() || r == m) return es;
    // double-edge switches preserve degrees; enough of them mix the circulant start
    const long switches = 20L * static_cast<long>(es.size());
    for (long t = 0; t < switches; ++t) {
        size_t i = rng.below(es.size()), j = rng.below(es.size());
        auto [a1, b1] = es[i];
        auto [a2, b2] = es[j];
        if (a1 == a2 || b1 == b2) continue;
        if (present.count({a1, b2}) || present.count({a2, b1})) continue;
        present.erase(es[i]);
        present.erase(es[j]);
        es[i] = {a1, b2};
        es[j] = {a2, b1};
        present.insert(es[i]);
        present.insert(es[j]);
    }
    std::sort(es.begin(), es.end());
    return es;
}

MultiGraph two_cliques(int n, int s, int matchings) {
    if (n < 1 || s < 1 || s > n || matchings < 0) throw std::invalid_argument("two_cliques: need 1 <= s <= n");
    if (matchings > s && s > 1) throw std::invalid_argument("two_cliques: more matchings than K_{s,s} holds");
    std::vector<std::pair<int, int>> es;
    for (int off : {0, n})
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) es.emplace_back(off + i, off + j);
    // matching t pairs V1[a] with V2[(a + t) mod s]; with s = 1 the matchings are parallel edges
    for (int t = 0; t < matchings; ++t)
        for (int a = 0; a < s; ++a) es.emplace_back(a, n + (a + t) % s);
    return MultiGraph(2 * n, es);
}

MultiGraph clique_star(int m, int l) {
    if (m < 1 || l < 1) throw std::invalid_argument("clique_star: need m, l >= 1");
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) es.emplace_back(i, j);
    int centre = m;
    es.emplace_back(0, centre);
    for (int t = 1; t < l; ++t) es.emplace_back(centre, m + t);
    return MultiGraph(m + l, es);
}

MultiGraph clique_triangles(int m, int t) {
    if (t > m) throw std::invalid_argument("clique_triangles: more triangles than clique vertices");
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) es.emplace_back(i, j);
    for (int i = 0; i < t; ++i) {
        int a = m + 2 * i, b = m + 2 * i + 1;
        es.emplace_back(i, a);
        es.emplace_back(a, b);
        es.emplace_back(b, i);
    }
    return MultiGraph(m + 2 * t, es);
}

std::vector<std::pair<int, int>> near_regular_pair(int m, int r, int cycles, Rng& rng) {
    if (m < 2) throw std::invalid_argument("near_regular_pair: need m >= 2");
    auto es = random_regular_bipartite(m, r, rng);
    std::set<std::pair<int, int>> have(es.begin(), es.end());
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    for (int c = 0; c < cycles; ++c) {
        int t = rng.range(2, m);
        std::vector<std::pair<int, int>> best;
        int best_clash = -1;
        for (int tries = 0; tries < 50; ++tries) {
            auto A = rng.sample(idx, t), B = rng.sample(idx, t);
            std::vector<std::pair<int, int>> cyc;
            for (int j = 0; j < t; ++j) {
                cyc.emplace_back(A[j], B[j]);
                cyc.emplace_back(A[(j + 1) % t], B[j]);
            }
            int clash = 0;
            for (auto e : cyc) clash += static_cast<int>(have.count(e));
            if (best_clash < 0 || clash < best_clash) {
                best = cyc;
                best_clash = clash;
            }
            if (clash == 0) break;
        }
        for (auto e : best) {
            es.push_back(e);
            have.insert(e);
        }
    }
    return es;
}

BlowupInstance blowup_cycle(int k, int m, const Rational& d, Rng& rng) {
    if (k < 3) throw std::invalid_argument("blowup_cycle: k must be >= 3");
    Rational dm = d * m;
    if (dm.denominator() != 1) throw std::invalid_argument("blowup_cycle: d*m must be an integer");
    int r = static_cast<int>(dm.numerator());
    if (r < 1 || r > m) throw std::invalid_argument("blowup_cycle: need 1 <= d*m <= m");
    BlowupInstance inst;
    inst.pair_degree = r;
    for (int i = 0; i < k; ++i) {
        std::vector<Vertex> c(m);
        for (int t = 0; t < m; ++t) c[t] = i * m + t;
        inst.part.clusters.push_back(c);
    }
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < k; ++i) {
        int j = (i + 1) % k;
        for (auto [a, b] : random_regular_bipartite(m, r, rng)) es.emplace_back(i * m + a, j * m + b);
        inst.reduced.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(inst.reduced.begin(), inst.reduced.end());
    inst.g = MultiGraph(k * m, es);
    derive_support(inst.g, inst.part);
    inst.part.m_prime = m;
    return inst;
}

BlowupInstance inject_parity_defects(const BlowupInstance& inst, int s, Rng& rng) {
    const int k = inst.part.k(), m = inst.part.m();
    if (s < 1 || s > m) throw std::invalid_argument("inject_parity_defects: need 1 <= s <= m");
    std::vector<std::vector<Vertex>> S(k);
    for (int i = 0; i < k; ++i) S[i] = rng.sample(inst.part.clusters[i], s);
    std::map<std::pair<int, int>, int> mult;
    for (const auto& e : inst.g.edges()) ++mult[std::minmax(e.u, e.v)];
    for (int i = 0; i < k; ++i) {
        const auto& X = S[i];
        const auto& Y = S[(i + 1) % k];
        for (int t = 0; t < s; ++t) {
            auto key = std::minmax(X[t], Y[t]);
            if (mult[key] > 0)
                --mult[key];
            else
                ++mult[key];
        }
    }
    std::vector<std::pair<int, int>> es;
    for (auto [key, c] : mult)
        for (int t = 0; t < c; ++t) es.push_back(key);
    BlowupInstance out = inst;
    out.g = MultiGraph(inst.g.n(), es);
    derive_support(out.g, out.part);
    return out;
}

}  // namespace pcd

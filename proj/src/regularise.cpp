#include "pcd/regularise.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "pcd/decomp_basic.hpp"

namespace pcd {

OddityLedger::OddityLedger(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>* alive)
    : k_(part.k()), cluster_(cluster_index(part, g.n())) {
    parity_.assign(static_cast<size_t>(g.n()) * std::max(k_, 1), 0);
    odd_count_.assign(g.n(), 0);
    for (const auto& e : g.edges()) {
        if (alive && !(*alive)[e.id]) continue;
        int cu = cluster_[e.u], cv = cluster_[e.v];
        if (cu < 0 || cv < 0) continue;
        flip(e.u, cv);
        flip(e.v, cu);
    }
}

void OddityLedger::flip(Vertex x, int j) {
    char& b = parity_[static_cast<size_t>(x) * k_ + j];
    int before = odd_count_[x];
    b ^= 1;
    odd_count_[x] += b ? 1 : -1;
    total_ += b ? 1 : -1;
    if (before == 0 && odd_count_[x] > 0) ++positive_;
    if (before > 0 && odd_count_[x] == 0) --positive_;
}

void OddityLedger::remove_edge(const MultiGraph& g, EdgeId e) {
    const Edge& ed = g.edge(e);
    int cu = cluster_[ed.u], cv = cluster_[ed.v];
    if (cu < 0 || cv < 0) return;
    flip(ed.u, cv);
    flip(ed.v, cu);
}

std::vector<Vertex> OddityLedger::support() const {
    std::vector<Vertex> s;
    for (Vertex x = 0; x < static_cast<Vertex>(odd_count_.size()); ++x)
        if (odd_count_[x] > 0) s.push_back(x);
    return s;
}

bool OddityLedger::operator==(const OddityLedger& o) const {
    return parity_ == o.parity_ && odd_count_ == o.odd_count_ && total_ == o.total_ && positive_ == o.positive_;
}

int oddity(const MultiGraph& g, const ClusterPartition& part, Vertex x, const std::vector<char>* alive) {
    auto cidx = cluster_index(part, g.n());
    if (cidx.at(x) < 0) throw std::invalid_argument("oddity: vertex lies in V0");
    std::vector<int> cnt(part.k(), 0);
    for (EdgeId e : g.incident(x)) {
        if (alive && !(*alive)[e]) continue;
        int c = cidx[g.edge(e).other(x)];
        if (c >= 0) ++cnt[c];
    }
    int o = 0;
    for (int c : cnt) o += c % 2;
    return o;
}

Rational eulerianise_bound(const Rational& d, int k) {
    Rational kk(k);
    return 20 * kk * kk / d + 21 * kk / 2 + 25 * kk * kk * kk * kk * (kk - 1);
}

namespace {

struct PairingState {
    const MultiGraph& g;
    const ClusterPartition& part;
    std::vector<int> cidx;
    std::vector<std::vector<int>> reduced;
    std::vector<char> alive;
    OddityLedger ledger;
    int k;

    PairingState(const MultiGraph& gg, const ClusterPartition& pp)
        : g(gg), part(pp), cidx(cluster_index(pp, gg.n())), reduced(reduced_counts(gg, pp)),
          alive(gg.m(), 1), ledger(gg, pp), k(pp.k()) {}

    std::vector<char> pair_mask(const std::vector<char>& base, int A, int B) const {
        std::vector<char> mask(g.m(), 0);
        for (const auto& e : g.edges()) {
            if (!base[e.id]) continue;
            int a = cidx[e.u], b = cidx[e.v];
            if ((a == A && b == B) || (a == B && b == A)) mask[e.id] = 1;
        }
        return mask;
    }

    void remove_cycle(const Walk& c) {
        for (EdgeId e : c.edges) {
            alive[e] = 0;
            ledger.remove_edge(g, e);
        }
    }
};

// Walk-growing of Steps 1 and 2. Returns the closed cycle and the case counts.
std::vector<Walk> grow_and_close(PairingState& st, int step, int L, Rng& rng, OddityStep& rec, std::vector<std::string>& notes) {
    const MultiGraph& g = st.g;
    const int k = st.k;
    auto S = st.ledger.support();
    std::vector<char> inS(g.n(), 0);
    for (Vertex x : S) inS[x] = 1;
    Vertex x0 = S[rng.below(S.size())];
    std::vector<char> cur = st.alive;  // G \ P
    OddityLedger led = st.ledger;
    std::vector<char> onpath(g.n(), 0);
    std::vector<EdgeId> pedges;
    onpath[x0] = 1;
    Vertex xi = x0;
    int covered = 1;
    auto blocked_for = [&](Vertex a, Vertex b) {
        std::vector<char> bl = onpath;
        if (step == 2)
            for (Vertex x : S) bl[x] = 1;
        bl[a] = 0;
        bl[b] = 0;
        return bl;
    };
    auto extend = [&](const std::vector<EdgeId>& q) {
        Vertex c = xi;
        for (EdgeId e : q) {
            cur[e] = 0;
            led.remove_edge(g, e);
            pedges.push_back(e);
            c = g.edge(e).other(c);
            onpath[c] = 1;
        }
        xi = c;
        if (inS[c]) ++covered;
    };
    while (true) {
        const int len = static_cast<int>(pedges.size());
        if (len >= L) {
            rec.kind = "long";
            break;
        }
        if (step == 2 && covered == static_cast<int>(S.size())) {
            rec.kind = "covered";
            break;
        }
        const int A = st.cidx[xi];
        bool moved = false;
        // case 1(a): a partner with odd degree into the same pair
        for (int B = 0; B < k && !moved; ++B) {
            if (B == A || st.reduced[A][B] == 0 || !led.odd_into(xi, B)) continue;
            auto mask = st.pair_mask(cur, A, B);
            for (Vertex y : S) {
                if (onpath[y] || y == xi) continue;
                int cy = st.cidx[y];
                bool ok = (cy == A && led.odd_into(y, B)) || (cy == B && led.odd_into(y, A));
                if (!ok) continue;
                auto bl = blocked_for(xi, y);
                auto q = bfs_path(g, xi, y, mask, &bl, 4);
                if (!q) continue;
                extend(*q);
                ++rec.case_1a;
                moved = true;
                break;
            }
        }
        if (moved) continue;
        // case 1(b): any uncovered vertex of positive oddity
        for (Vertex y : S) {
            if (onpath[y]) continue;
            auto bl = blocked_for(xi, y);
            auto q = bfs_path(g, xi, y, cur, &bl, 2 * k);
            if (!q) continue;
            extend(*q);
            ++rec.case_1b;
            moved = true;
            break;
        }
        if (!moved) {
            rec.kind = "stuck";
            break;
        }
    }
    if (pedges.empty()) throw OperationalError("eulerianise_pairs", "step " + std::to_string(step) + ": no walk from vertex " + std::to_string(x0));
    auto bl = blocked_for(xi, x0);
    auto q = bfs_path(g, xi, x0, cur, &bl, 2 * k);
    if (!q) {
        q = bfs_path(g, xi, x0, cur, &bl, -1);
        if (q) notes.push_back("step " + std::to_string(step) + ": closing path longer than 2k");
    }
    if (!q) {
        q = bfs_path(g, xi, x0, cur, nullptr, -1);
        if (!q)
            throw OperationalError("eulerianise_pairs", "step " + std::to_string(step) + ": cannot close walk at vertex " + std::to_string(xi));
        // the closing path meets the walk: the union is a closed trail, removed as its cycles
        notes.push_back("step " + std::to_string(step) + ": closing path meets the walk; trail split into cycles");
        std::vector<char> mask(g.m(), 0);
        for (EdgeId e : pedges) mask[e] = 1;
        for (EdgeId e : *q) mask[e] = 1;
        return euler_split(g, &mask);
    }
    std::vector<EdgeId> all = pedges;
    all.insert(all.end(), q->begin(), q->end());
    return {walk_from_edges(g, WalkKind::Cycle, x0, all)};
}

Walk greedy_pairing_cycle(PairingState& st, std::vector<std::string>& notes) {
    const MultiGraph& g = st.g;
    const int k = st.k;
    auto S = st.ledger.support();
    Vertex x0 = S.front();
    std::vector<char> cur = st.alive;
    OddityLedger led = st.ledger;
    std::vector<int> pos(g.n(), -1);
    std::vector<EdgeId> pedges;
    std::vector<Vertex> pverts{x0};
    pos[x0] = 0;
    Vertex xi = x0;
    for (size_t guard = 0; guard <= S.size() + 1; ++guard) {
        const int A = st.cidx[xi];
        for (int B = 0; B < k; ++B) {
            if (B == A || !led.odd_into(xi, B)) continue;
            auto mask = st.pair_mask(cur, A, B);
            for (Vertex y : S) {
                if (y == xi) continue;
                int cy = st.cidx[y];
                bool ok = (cy == A && led.odd_into(y, B)) || (cy == B && led.odd_into(y, A));
                if (!ok) continue;
                std::vector<char> bl(g.n(), 0);
                for (Vertex v : pverts) bl[v] = 1;
                for (Vertex v : S) bl[v] = 1;
                bl[xi] = bl[y] = 0;
                auto q = bfs_path(g, xi, y, mask, &bl, 4);
                if (!q) {
                    q = bfs_path(g, xi, y, mask, &bl, -1);
                    if (q) notes.push_back("step 3: pairing path longer than 4 at vertex " + std::to_string(xi));
                }
                if (!q) continue;
                if (pos[y] >= 0) {
                    std::vector<EdgeId> cyc(pedges.begin() + pos[y], pedges.end());
                    cyc.insert(cyc.end(), q->begin(), q->end());
                    return walk_from_edges(g, WalkKind::Cycle, y, cyc);
                }
                Vertex c = xi;
                for (EdgeId e : *q) {
                    cur[e] = 0;
                    led.remove_edge(g, e);
                    pedges.push_back(e);
                    c = g.edge(e).other(c);
                    pos[c] = static_cast<int>(pedges.size());
                    pverts.push_back(c);
                }
                xi = y;
                goto next;
            }
        }
        throw OperationalError("eulerianise_pairs", "step 3: no short pairing path from vertex " + std::to_string(xi));
    next:;
    }
    throw OperationalError("eulerianise_pairs", "step 3: pairing walk did not close");
}

}  // namespace

EulerianiseResult eulerianise_pairs(const MultiGraph& g, const ClusterPartition& part, const Rational& d, Rng& rng,
                                    const EulerianiseOptions& opt) {
    if (d <= 0 || d > 1) throw std::invalid_argument("eulerianise_pairs: d must lie in (0, 1]");
    std::string why = check_partition(part, g.n());
    if (!why.empty()) throw std::invalid_argument("eulerianise_pairs: " + why);
    if (!degree_stats(g).eulerian()) throw std::invalid_argument("eulerianise_pairs: graph is not Eulerian");
    for (Vertex x : part.V0)
        if (g.degree(x) > 0) throw std::invalid_argument("eulerianise_pairs: V0 vertex " + std::to_string(x) + " is not isolated");
    auto cidx = cluster_index(part, g.n());
    for (const auto& e : g.edges())
        if (cidx[e.u] == cidx[e.v]) throw std::invalid_argument("eulerianise_pairs: edge inside a cluster");
    if (opt.verify_partition) {
        auto rep = check_superregular_partition(g, part, opt.eps, d, true);
        if (!rep.ok()) throw std::invalid_argument("eulerianise_pairs: partition is not superregular");
    }
    const int k = part.k();
    const int mp = part.m_prime > 0 ? part.m_prime : part.m();
    EulerianiseResult res;
    res.bound = eulerianise_bound(d, k);
    Rational quarter = d * mp / 4;
    res.long_threshold = static_cast<int>(ceil_of(quarter));
    if (quarter < 4) {
        res.long_threshold = std::max(res.long_threshold, 6);
        res.threshold_adjusted = true;
        res.notes.push_back("long-cycle threshold raised to max(dm'/4, 6) = " + std::to_string(res.long_threshold));
    }
    PairingState st(g, part);
    const Rational half = d * mp / 2;
    const std::int64_t c1 = ceil_of(20 * Rational(k * k) / d);
    const std::int64_t c2 = ceil_of(Rational(21 * k, 2));
    const std::int64_t c3 = 25LL * k * k * k * k * (k - 1);
    auto run_step = [&](int step, auto&& keep_going, std::int64_t cap) {
        std::int64_t count = 0;
        while (st.ledger.positive() > 0 && keep_going()) {
            if (++count > cap)
                throw OperationalError("eulerianise_pairs", "step " + std::to_string(step) + " exceeded " + std::to_string(cap) + " cycles");
            OddityStep rec;
            rec.step = step;
            rec.O_before = st.ledger.total();
            rec.N_before = st.ledger.positive();
            std::vector<Walk> cs;
            if (step == 3) {
                cs.push_back(greedy_pairing_cycle(st, res.notes));
                rec.kind = "greedy";
            } else {
                cs = grow_and_close(st, step, res.long_threshold, rng, rec, res.notes);
            }
            count += static_cast<std::int64_t>(cs.size()) - 1;
            for (auto& c : cs) {
                st.remove_cycle(c);
                rec.length += c.length();
                res.removed.push_back(std::move(c));
            }
            rec.O_after = st.ledger.total();
            rec.N_after = st.ledger.positive();
            res.trace.push_back(rec);
        }
    };
    run_step(1, [&] { return Rational(st.ledger.positive()) >= half; }, c1);
    run_step(2, [&] { return st.ledger.positive() >= 100LL * k * k * k * k; }, c2);
    run_step(3, [&] { return true; }, c3);
    res.alive = st.alive;
    return res;
}

RegulariseResult regularise_pair(const BipartitePair& p, Rng& rng, const Rational& eta) {
    if (p.mA() != p.mB()) throw std::invalid_argument("regularise_pair: pair is not balanced");
    const int m = p.mA();
    for (int a = 0; a < m; ++a)
        if (p.degA(a) % 2 || p.degB(a) % 2) throw std::invalid_argument("regularise_pair: pair is not Eulerian");
    RegulariseResult res;
    res.max_degree = m ? p.max_degree() : 0;
    res.theta = m ? p.max_degree() - p.min_degree() : 0;
    if (Rational(res.theta) > eta * m)
        throw std::invalid_argument("regularise_pair: Theta = " + std::to_string(res.theta) + " exceeds eta m");
    const size_t E = p.edge_ids().size();
    std::unordered_map<EdgeId, int> pos_of;
    for (size_t i = 0; i < E; ++i) pos_of[p.edge_ids()[i]] = static_cast<int>(i);
    const Rational floor12 = m ? density(p) * m / 12 : Rational(0);
    std::string failure;
    for (int run = 0; run < kRetryBudget; ++run) {
        try {
            std::vector<char> alive(E, 1);
            std::vector<char> prevA2, prevB2, prevSA, prevSB;
            res.removed.clear();
            res.trace.clear();
            HamiltonOptions hopt;
            hopt.restarts_per_vertex = 10;

            for (int i = 0;; ++i) {
                std::vector<int> keep;
                for (size_t q = 0; q < E; ++q)
                    if (alive[q]) keep.push_back(static_cast<int>(q));
                BipartitePair G = p.with_edges(keep);
                if (m == 0 || G.max_degree() == G.min_degree()) {
                    res.r = m ? G.max_degree() : 0;
                    for (int q : keep) res.kept.push_back(p.edge_ids()[q]);
                    return res;
                }
                if (i >= 2 * res.theta)
                    throw OperationalError("regularise_pair", "iteration " + std::to_string(i) + " reached 2 Theta without a regular pair");
                const int Dmax = G.max_degree(), Dmin = G.min_degree();
                std::vector<int> ADelta, BDelta, Adelta, Bdelta;
                for (int a = 0; a < m; ++a) {
                    if (G.degA(a) == Dmax) ADelta.push_back(a);
                    if (G.degA(a) == Dmin) Adelta.push_back(a);
                    if (G.degB(a) == Dmax) BDelta.push_back(a);
                    if (G.degB(a) == Dmin) Bdelta.push_back(a);
                }
                // distinct neighbourhoods for clause (c)
                auto distinct = [](std::vector<int> v) {
                    std::sort(v.begin(), v.end());
                    v.erase(std::unique(v.begin(), v.end()), v.end());
                    return v;
                };
                auto split = [&](const std::vector<int>& delta, bool sideA, std::vector<char>& one, std::vector<char>& two) {
                    const Rational big = density(p) * m / 6;
                    for (int tries = 0; tries < 200; ++tries) {
                        one.assign(m, 0);
                        two.assign(m, 0);
                        std::vector<int> v = delta;
                        rng.shuffle(v);
                        size_t n1;
                        if (Rational(static_cast<std::int64_t>(delta.size())) >= big) {
                            n1 = 0;
                            for (size_t j = 0; j < v.size(); ++j) n1 += rng.below(2);
                            n1 = std::max(n1, v.size() - n1);
                            if (3 * (v.size() - n1) < v.size() || 3 * n1 > 2 * v.size()) continue;
                        } else {
                            n1 = (v.size() + 1) / 2;
                        }
                        for (size_t j = 0; j < v.size(); ++j) (j < n1 ? one : two)[v[j]] = 1;
                        bool ok = true;
                        for (int o = 0; o < m && ok; ++o) {
                            auto nb = distinct(sideA ? G.nbrB(o) : G.nbrA(o));
                            int out1 = 0, out2 = 0;
                            for (int x : nb) {
                                out1 += !one[x];
                                out2 += !two[x];
                            }
                            ok = Rational(out1) >= floor12 && Rational(out2) >= floor12;
                        }
                        if (ok) return true;
                    }
                    return false;
                };
                bool done = false;
                std::string last = "no attempt";
                for (int attempt = 0; attempt < 5 && !done; ++attempt) {
                    std::vector<char> A1, A2, B1, B2, allowA(m, 1), allowB(m, 1);
                    if (i % 2 == 0) {
                        if (!split(Adelta, true, A1, A2) || !split(Bdelta, false, B1, B2)) {
                            last = "degree split clauses unsatisfied";
                            continue;
                        }
                        for (int x = 0; x < m; ++x) {
                            allowA[x] = !A1[x];
                            allowB[x] = !B1[x];
                        }
                    } else {
                        for (int x = 0; x < m; ++x) {
                            allowA[x] = !(prevA2[x] && prevSA[x]);
                            allowB[x] = !(prevB2[x] && prevSB[x]);
                        }
                    }
                    int s = std::min(static_cast<int>(std::count(allowA.begin(), allowA.end(), 1)),
                                     static_cast<int>(std::count(allowB.begin(), allowB.end(), 1)));
                    bool fits = 3 * s >= m && s >= static_cast<int>(ADelta.size()) && s >= static_cast<int>(BDelta.size());
                    for (int a : ADelta) fits = fits && allowA[a];
                    for (int b : BDelta) fits = fits && allowB[b];
                    if (!fits) {
                        last = "S sets infeasible (s = " + std::to_string(s) + ")";
                        continue;
                    }
                    auto pick = [&](const std::vector<int>& must, const std::vector<char>& allow) {
                        std::vector<char> in(m, 0);
                        for (int x : must) in[x] = 1;
                        std::vector<int> rest;
                        for (int x = 0; x < m; ++x)
                            if (allow[x] && !in[x]) rest.push_back(x);
                        auto extra = rng.sample(rest, static_cast<size_t>(s) - must.size());
                        std::vector<int> out = must;
                        out.insert(out.end(), extra.begin(), extra.end());
                        std::sort(out.begin(), out.end());
                        return out;
                    };
                    // among a few random fillers keep the one whose sub-pair has the largest minimum degree
                    auto SA = pick(ADelta, allowA), SB = pick(BDelta, allowB);
                    BipartitePair sub = G.induced(SA, SB);
                    auto min_nbrs = [](const BipartitePair& q) {
                        int best = INT32_MAX;
                        for (int a = 0; a < q.mA(); ++a) best = std::min<int>(best, static_cast<int>(std::set<int>(q.nbrA(a).begin(), q.nbrA(a).end()).size()));
                        for (int b = 0; b < q.mB(); ++b) best = std::min<int>(best, static_cast<int>(std::set<int>(q.nbrB(b).begin(), q.nbrB(b).end()).size()));
                        return best;
                    };
                    int score = min_nbrs(sub);
                    for (int c = 0; c < 30; ++c) {
                        auto SA2 = pick(ADelta, allowA), SB2 = pick(BDelta, allowB);
                        BipartitePair sub2 = G.induced(SA2, SB2);
                        int sc = min_nbrs(sub2);
                        if (sc > score) {
                            score = sc;
                            SA = std::move(SA2);
                            SB = std::move(SB2);
                            sub = std::move(sub2);
                        }
                    }
                    ++res.attempts;
                    try {
                        PairCycle c = bipartite_hamilton(sub, rng, hopt);
                        for (EdgeId e : c.edges) alive[pos_of.at(e)] = 0;
                        res.trace.push_back("iteration " + std::to_string(i) + ": Delta " + std::to_string(Dmax) + " delta " +
                                            std::to_string(Dmin) + " |S| " + std::to_string(s) + " cycle " + std::to_string(c.edges.size()));
                        res.removed.push_back(std::move(c));
                        if (i % 2 == 0) {
                            prevA2 = A2;
                            prevB2 = B2;
                            prevSA.assign(m, 0);
                            prevSB.assign(m, 0);
                            for (int a : SA) prevSA[a] = 1;
                            for (int b : SB) prevSB[b] = 1;
                        }
                        done = true;
                    } catch (const OperationalError& e) {
                        last = e.what();
                    }
                }
                if (!done)
                    throw OperationalError("regularise_pair", "iteration " + std::to_string(i) + ": " + last);
            }
        } catch (const OperationalError& e) {
            failure = e.what();
        }
    }
    throw OperationalError("regularise_pair", "retry budget exhausted; last failure: " + failure);
}

GraphEulerianiseResult eulerianise_graph(const MultiGraph& g, Rational alpha) {
    GraphEulerianiseResult res;
    res.alive.assign(g.m(), 1);
    const int n = g.n();
    if (n == 0) return res;
    auto ds = degree_stats(g);
    if (alpha <= 0) alpha = Rational(ds.min_degree, n);
    if (Rational(ds.min_degree) < alpha * n)
        throw std::invalid_argument("eulerianise_graph: minimum degree below alpha n");
    res.alpha = alpha;
    const int odd_total = static_cast<int>(ds.odd.size());
    if (alpha > 0) {
        res.edge_budget = Rational(odd_total) + 5 / (alpha * alpha);
        res.long_length_cap = 5 / alpha;
    }
    std::vector<char> odd(n, 0);
    for (Vertex x : ds.odd) odd[x] = 1;
    std::vector<int> deleted(n, 0);
    auto take = [&](Vertex start, const std::vector<EdgeId>& es) {
        for (EdgeId e : es) {
            res.alive[e] = 0;
            ++deleted[g.edge(e).u];
            ++deleted[g.edge(e).v];
        }
        Walk w = walk_from_edges(g, WalkKind::Path, start, es);
        odd[w.front()] = 0;
        odd[w.back()] = 0;
        res.removed_edges += w.length();
        res.removed.push_back(std::move(w));
    };
    // maximal matching on the odd vertices
    for (const auto& e : g.edges())
        if (e.u != e.v && odd[e.u] && odd[e.v]) {
            take(e.u, {e.id});
            ++res.matching_paths;
        }
    // cherries x y z through lightly used midpoints
    const Rational light = alpha * n / 4;
    for (Vertex x = 0; x < n; ++x) {
        if (!odd[x]) continue;
        bool found = false;
        for (EdgeId e1 : g.incident(x)) {
            if (!res.alive[e1] || found) continue;
            Vertex y = g.edge(e1).other(x);
            if (y == x || odd[y] || Rational(deleted[y]) >= light) continue;
            for (EdgeId e2 : g.incident(y)) {
                if (!res.alive[e2] || e2 == e1) continue;
                Vertex z = g.edge(e2).other(y);
                if (z == x || z == y || !odd[z]) continue;
                take(x, {e1, e2});
                ++res.cherry_paths;
                found = true;
                break;
            }
        }
    }
    // pair the rest inside components by shortest paths
    for (Vertex x = 0; x < n; ++x) {
        if (!odd[x]) continue;
        std::vector<int> dist(n, -1);
        std::vector<EdgeId> via(n, -1);
        std::deque<Vertex> q{x};
        dist[x] = 0;
        Vertex target = -1;
        while (!q.empty() && target < 0) {
            Vertex u = q.front();
            q.pop_front();
            for (EdgeId e : g.incident(u)) {
                if (!res.alive[e]) continue;
                Vertex w = g.edge(e).other(u);
                if (dist[w] >= 0) continue;
                dist[w] = dist[u] + 1;
                via[w] = e;
                if (odd[w]) {
                    target = w;
                    break;
                }
                q.push_back(w);
            }
        }
        if (target < 0) throw std::logic_error("eulerianise_graph: odd vertex without a partner in its component");
        std::vector<EdgeId> es;
        for (Vertex c = target; c != x; c = g.edge(via[c]).other(c)) es.push_back(via[c]);
        std::reverse(es.begin(), es.end());
        res.max_long_length = std::max(res.max_long_length, static_cast<int>(es.size()));
        take(x, es);
        ++res.long_paths;
    }
    return res;
}

}  // namespace pcd

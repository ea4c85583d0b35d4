#include "pcd/regularity.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace pcd {

BipartitePair BipartitePair::from_graph(const MultiGraph& g, std::vector<Vertex> A, std::vector<Vertex> B,
                                        const std::vector<char>* alive) {
    BipartitePair p;
    std::vector<int> side(g.n(), -1);
    for (size_t i = 0; i < A.size(); ++i) side[A[i]] = static_cast<int>(i);
    for (size_t i = 0; i < B.size(); ++i) {
        if (side[B[i]] != -1) throw std::invalid_argument("A and B intersect");
        side[B[i]] = static_cast<int>(A.size() + i);
    }
    int mA = static_cast<int>(A.size());
    for (const auto& e : g.edges()) {
        if (alive && !(*alive)[e.id]) continue;
        int su = side[e.u], sv = side[e.v];
        if (su < 0 || sv < 0) continue;
        if (su < mA && sv >= mA) {
            p.edges_.push_back(e.id);
            p.local_.emplace_back(su, sv - mA);
        } else if (sv < mA && su >= mA) {
            p.edges_.push_back(e.id);
            p.local_.emplace_back(sv, su - mA);
        }
    }
    p.A_ = std::move(A);
    p.B_ = std::move(B);
    p.index();
    return p;
}

BipartitePair BipartitePair::from_local(int mA, int mB, const std::vector<std::pair<int, int>>& local_edges) {
    BipartitePair p;
    for (int i = 0; i < mA; ++i) p.A_.push_back(i);
    for (int i = 0; i < mB; ++i) p.B_.push_back(mA + i);
    for (size_t i = 0; i < local_edges.size(); ++i) {
        auto [a, b] = local_edges[i];
        if (a < 0 || a >= mA || b < 0 || b >= mB) throw std::invalid_argument("local edge out of range");
        p.edges_.push_back(static_cast<EdgeId>(i));
        p.local_.emplace_back(a, b);
    }
    p.index();
    return p;
}

BipartitePair BipartitePair::with_edges(const std::vector<int>& keep) const {
    BipartitePair p;
    p.A_ = A_;
    p.B_ = B_;
    for (int i : keep) {
        p.edges_.push_back(edges_.at(i));
        p.local_.push_back(local_.at(i));
    }
    p.index();
    return p;
}

BipartitePair BipartitePair::induced(const std::vector<int>& a_local, const std::vector<int>& b_local) const {
    std::vector<int> amap(mA(), -1), bmap(mB(), -1);
    BipartitePair p;
    for (size_t i = 0; i < a_local.size(); ++i) {
        amap[a_local[i]] = static_cast<int>(i);
        p.A_.push_back(A_[a_local[i]]);
    }
    for (size_t i = 0; i < b_local.size(); ++i) {
        bmap[b_local[i]] = static_cast<int>(i);
        p.B_.push_back(B_[b_local[i]]);
    }
    for (size_t i = 0; i < local_.size(); ++i) {
        auto [a, b] = local_[i];
        if (amap[a] < 0 || bmap[b] < 0) continue;
        p.edges_.push_back(edges_[i]);
        p.local_.emplace_back(amap[a], bmap[b]);
    }
    p.index();
    return p;
}

void BipartitePair::index() {
    int a_n = mA(), b_n = mB();
    cnt_.assign(static_cast<size_t>(a_n) * b_n, 0);
    degA_.assign(a_n, 0);
    degB_.assign(b_n, 0);
    nbrA_.assign(a_n, {});
    nbrB_.assign(b_n, {});
    for (auto [a, b] : local_) {
        if (cnt_[static_cast<size_t>(a) * b_n + b]++ == 0) {
            nbrA_[a].push_back(b);
            nbrB_[b].push_back(a);
        }
        ++degA_[a];
        ++degB_[b];
    }
    for (auto& v : nbrA_) std::sort(v.begin(), v.end());
    for (auto& v : nbrB_) std::sort(v.begin(), v.end());
}

int BipartitePair::max_degree() const {
    int best = 0;
    for (int d : degA_) best = std::max(best, d);
    for (int d : degB_) best = std::max(best, d);
    return best;
}

int BipartitePair::min_degree() const {
    int best = INT32_MAX;
    for (int d : degA_) best = std::min(best, d);
    for (int d : degB_) best = std::min(best, d);
    return best == INT32_MAX ? 0 : best;
}

MultiGraph BipartitePair::to_graph() const {
    std::vector<std::pair<int, int>> el;
    el.reserve(local_.size());
    for (auto [a, b] : local_) el.emplace_back(a, mA() + b);
    return MultiGraph(mA() + mB(), el);
}

std::string to_string(RegMode m) {
    switch (m) {
        case RegMode::Auto: return "auto";
        case RegMode::Exhaustive: return "exhaustive";
        case RegMode::Sampled: return "sampled";
        case RegMode::CodegreeCertificate: return "codegree";
    }
    return "?";
}

Rational density(const BipartitePair& p) {
    if (p.mA() == 0 || p.mB() == 0) throw std::invalid_argument("density of a pair with an empty side");
    return Rational(p.e(), static_cast<std::int64_t>(p.mA()) * p.mB());
}

namespace {

struct Interval {
    Rational lo, hi;
    bool lo_strict, hi_strict;
    bool contains(const Rational& x) const {
        bool a = lo_strict ? x > lo : x >= lo;
        bool b = hi_strict ? x < hi : x <= hi;
        return a && b;
    }
};

int min_size(const Rational& eps, int m) { return static_cast<int>(std::max<std::int64_t>(1, ceil_of(eps * m))); }

struct ScanResult {
    RegMode mode;
    int samples = 0;
    std::optional<RegularityWitness> witness;
};

// Looks for A' (|A'| >= eps mA), B' (|B'| >= eps mB) with d(A',B') outside `ok`.
// Exhaustive mode enumerates subsets of the smaller side; for each one the extreme
// densities over the other side at every admissible size are attained by taking the
// vertices with the fewest or the most neighbours, so that scan is exact.
ScanResult scan(const BipartitePair& p, const Rational& eps, const Interval& ok, RegMode mode, std::uint64_t seed) {
    ScanResult res;
    int mA = p.mA(), mB = p.mB();
    if (mode == RegMode::Auto) mode = (mA + mB <= kExhaustiveCap) ? RegMode::Exhaustive : RegMode::Sampled;
    res.mode = mode;
    if (mode == RegMode::Exhaustive) {
        if (mA + mB > kExhaustiveCap)
            throw std::invalid_argument("exhaustive regularity test needs mA + mB <= " + std::to_string(kExhaustiveCap) +
                                        ", got " + std::to_string(mA + mB) + "; use sampled mode");
        bool flip = mB < mA;
        int mX = flip ? mB : mA, mY = flip ? mA : mB;
        int sx = min_size(eps, mX), sy = min_size(eps, mY);
        auto cnt = [&](int x, int y) { return flip ? p.count(y, x) : p.count(x, y); };
        std::vector<std::pair<int, int>> cy(mY);
        for (std::uint32_t mask = 1; mask < (1u << mX); ++mask) {
            int x = __builtin_popcount(mask);
            if (x < sx) continue;
            for (int y = 0; y < mY; ++y) {
                int c = 0;
                for (int i = 0; i < mX; ++i)
                    if (mask >> i & 1) c += cnt(i, y);
                cy[y] = {c, y};
            }
            std::sort(cy.begin(), cy.end());
            std::int64_t low = 0, high = 0;
            for (int s = 1; s <= mY; ++s) {
                low += cy[s - 1].first;
                high += cy[mY - s].first;
                if (s < sy) continue;
                Rational dl(low, static_cast<std::int64_t>(x) * s), dh(high, static_cast<std::int64_t>(x) * s);
                bool bad_low = !ok.contains(dl), bad_high = !ok.contains(dh);
                if (!bad_low && !bad_high) continue;
                RegularityWitness w;
                std::vector<Vertex> X, Y;
                for (int i = 0; i < mX; ++i)
                    if (mask >> i & 1) X.push_back(flip ? p.B()[i] : p.A()[i]);
                for (int t = 0; t < s; ++t) {
                    int y = bad_low ? cy[t].second : cy[mY - 1 - t].second;
                    Y.push_back(flip ? p.A()[y] : p.B()[y]);
                }
                std::sort(Y.begin(), Y.end());
                w.A1 = flip ? Y : X;
                w.B1 = flip ? X : Y;
                w.density = bad_low ? dl : dh;
                res.witness = w;
                return res;
            }
        }
        return res;
    }
    if (mode != RegMode::Sampled) throw std::invalid_argument("scan mode must be exhaustive or sampled");
    Rng rng(seed);
    int sa = min_size(eps, mA), sb = min_size(eps, mB);
    std::vector<int> ai(mA), bi(mB);
    std::iota(ai.begin(), ai.end(), 0);
    std::iota(bi.begin(), bi.end(), 0);
    // Given one side X, every size of the other side is checked at its extreme densities;
    // the returned set is the densest (high) or sparsest (low) one of minimal size.
    auto respond = [&](const std::vector<int>& X, bool x_is_A, bool high) -> std::pair<bool, std::vector<int>> {
        int mY = x_is_A ? mB : mA, sy = x_is_A ? sb : sa;
        std::vector<std::pair<int, int>> cy(mY);
        for (int y = 0; y < mY; ++y) {
            int c = 0;
            for (int x : X) c += x_is_A ? p.count(x, y) : p.count(y, x);
            cy[y] = {c, y};
        }
        std::sort(cy.begin(), cy.end());
        std::int64_t low = 0, hi = 0, xs = static_cast<std::int64_t>(X.size());
        for (int t = 1; t <= mY; ++t) {
            low += cy[t - 1].first;
            hi += cy[mY - t].first;
            if (t < sy) continue;
            Rational dl(low, xs * t), dh(hi, xs * t);
            bool bad_low = !ok.contains(dl), bad_high = !ok.contains(dh);
            if (!bad_low && !bad_high) continue;
            std::vector<int> Y;
            for (int i = 0; i < t; ++i) Y.push_back(bad_low ? cy[i].second : cy[mY - 1 - i].second);
            RegularityWitness w;
            for (int x : X) (x_is_A ? w.A1 : w.B1).push_back(x_is_A ? p.A()[x] : p.B()[x]);
            for (int y : Y) (x_is_A ? w.B1 : w.A1).push_back(x_is_A ? p.B()[y] : p.A()[y]);
            std::sort(w.A1.begin(), w.A1.end());
            std::sort(w.B1.begin(), w.B1.end());
            w.density = bad_low ? dl : dh;
            res.witness = w;
            return {true, {}};
        }
        std::vector<int> Y;
        for (int i = 0; i < sy; ++i) Y.push_back(high ? cy[mY - 1 - i].second : cy[i].second);
        return {false, Y};
    };
    for (int t = 0; t < kSampleCount; ++t) {
        ++res.samples;
        auto a0 = rng.sample(ai, sa);
        for (bool high : {true, false}) {
            auto A1 = a0;
            for (int round = 0; round < 3; ++round) {
                auto [found, B1] = respond(A1, true, high);
                if (found) return res;
                auto [found2, A2] = respond(B1, false, high);
                if (found2) return res;
                A1 = A2;
            }
        }
    }
    return res;
}

}  // namespace

RegularityReport test_regular(const BipartitePair& p, const Rational& eps, RegMode mode, std::uint64_t seed) {
    if (eps <= 0 || eps > 1) throw std::invalid_argument("epsilon must lie in (0, 1]");
    RegularityReport rep;
    rep.density = density(p);
    rep.epsilon = eps;
    Interval ok{rep.density - eps, rep.density + eps, true, true};
    auto sr = scan(p, eps, ok, mode, seed);
    rep.mode = sr.mode;
    rep.samples = sr.samples;
    rep.witness = sr.witness;
    rep.regular = !sr.witness.has_value();
    return rep;
}

bool witness_violates(const BipartitePair& p, const RegularityWitness& w, const Rational& eps) {
    std::set<Vertex> A(p.A().begin(), p.A().end()), B(p.B().begin(), p.B().end());
    std::set<Vertex> A1(w.A1.begin(), w.A1.end()), B1(w.B1.begin(), w.B1.end());
    if (A1.size() != w.A1.size() || B1.size() != w.B1.size()) return false;
    for (Vertex x : A1)
        if (!A.count(x)) return false;
    for (Vertex x : B1)
        if (!B.count(x)) return false;
    if (Rational(static_cast<std::int64_t>(A1.size())) < eps * p.mA()) return false;
    if (Rational(static_cast<std::int64_t>(B1.size())) < eps * p.mB()) return false;
    std::int64_t e = 0;
    for (size_t i = 0; i < p.local_edges().size(); ++i) {
        auto [a, b] = p.local_edges()[i];
        if (A1.count(p.A()[a]) && B1.count(p.B()[b])) ++e;
    }
    Rational dd(e, static_cast<std::int64_t>(A1.size() * B1.size()));
    if (dd != w.density) return false;
    Rational diff = dd - density(p);
    if (diff < 0) diff = -diff;
    return diff >= eps;
}

CodegreeCertificate certify_regular_codegree(const BipartitePair& p, const Rational& eps) {
    CodegreeCertificate c;
    Rational d = density(p);
    int mA = p.mA(), mB = p.mB();
    for (int a = 0; a < mA; ++a)
        if (Rational(p.degA(a)) < (d - eps) * mB) ++c.low_degree_vertices;
    Rational heavy = (d + eps) * (d + eps) * mB;
    for (int a = 0; a < mA; ++a)
        for (int a2 = a + 1; a2 < mA; ++a2) {
            const auto& x = p.nbrA(a);
            const auto& y = p.nbrA(a2);
            int common = 0;
            size_t i = 0, j = 0;
            while (i < x.size() && j < y.size()) {
                if (x[i] == y[j]) {
                    ++common;
                    ++i;
                    ++j;
                } else if (x[i] < y[j])
                    ++i;
                else
                    ++j;
            }
            if (Rational(common) >= heavy) ++c.heavy_pairs;
        }
    c.implied_epsilon = 2.0 * std::pow(to_double(eps), 1.0 / 6.0);
    c.precondition = 2 * eps <= d;
    c.certified = c.precondition && Rational(c.low_degree_vertices) <= eps * mA &&
                  Rational(c.heavy_pairs) <= eps * static_cast<std::int64_t>(mA) * mA;
    return c;
}

namespace {

bool window(int deg, const Rational& d, const Rational& eps, int other) {
    Rational x(deg);
    return x >= (d - eps) * other && x <= (d + eps) * other;
}

SuperregularReport superregular_impl(const BipartitePair& p, const Rational& eps, std::optional<Rational> d,
                                     const Rational& dmin, RegMode mode, std::uint64_t seed) {
    SuperregularReport rep;
    if (p.mA() == 0 || p.mB() == 0) {
        rep.failure = "empty side";
        return rep;
    }
    rep.degrees_ok = true;
    if (d) {
        for (int a = 0; a < p.mA() && rep.degrees_ok; ++a)
            if (!window(p.degA(a), *d, eps, p.mB())) {
                rep.degrees_ok = false;
                rep.failure = "degree of " + std::to_string(p.A()[a]) + " outside window";
            }
        for (int b = 0; b < p.mB() && rep.degrees_ok; ++b)
            if (!window(p.degB(b), *d, eps, p.mA())) {
                rep.degrees_ok = false;
                rep.failure = "degree of " + std::to_string(p.B()[b]) + " outside window";
            }
    } else {
        // feasible d' lies in the intersection of [deg/other - eps, deg/other + eps] and [dmin, inf)
        Rational lo = dmin, hi(1000000);
        for (int a = 0; a < p.mA(); ++a) {
            Rational r(p.degA(a), p.mB());
            lo = std::max(lo, r - eps);
            hi = std::min(hi, r + eps);
        }
        for (int b = 0; b < p.mB(); ++b) {
            Rational r(p.degB(b), p.mA());
            lo = std::max(lo, r - eps);
            hi = std::min(hi, r + eps);
        }
        if (lo > hi) {
            rep.degrees_ok = false;
            rep.failure = "no density d' >= " + to_string(dmin) + " fits every degree window";
        }
    }
    if (std::min(p.mA(), p.mB()) < kSizeFloor) {
        rep.vacuous = true;
        rep.regularity.density = density(p);
        rep.regularity.epsilon = eps;
        rep.regularity.regular = true;
        rep.ok = rep.degrees_ok;
        return rep;
    }
    rep.regularity = test_regular(p, eps, mode, seed);
    if (!rep.regularity.regular && rep.failure.empty()) rep.failure = "not epsilon-regular";
    rep.ok = rep.degrees_ok && rep.regularity.regular;
    return rep;
}

}  // namespace

SuperregularReport check_superregular(const BipartitePair& p, const Rational& eps, const Rational& d, RegMode mode,
                                      std::uint64_t seed) {
    return superregular_impl(p, eps, d, Rational(0), mode, seed);
}

SuperregularReport check_superregular_at_least(const BipartitePair& p, const Rational& eps, const Rational& d,
                                               RegMode mode, std::uint64_t seed) {
    return superregular_impl(p, eps, std::nullopt, d, mode, seed);
}

SparseFlags check_sparse_superregular(const BipartitePair& p, const Rational& eps, const Rational& d,
                                      const Rational& dstar, const Rational& c, std::uint64_t seed) {
    if (p.mA() != p.mB()) throw std::invalid_argument("sparse superregularity needs a balanced pair");
    SparseFlags f;
    int m = p.mA();
    if (m == 0) throw std::invalid_argument("empty pair");
    Interval ok{(1 - eps) * d, (1 + eps) * d, false, false};
    auto sr = scan(p, eps, ok, RegMode::Auto, seed);
    f.reg1 = !sr.witness.has_value();
    f.reg1_mode = sr.mode;
    Rational cap = c * c * m;
    f.reg2 = true;
    auto codeg_ok = [&](const std::vector<std::vector<int>>& nb) {
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j) {
                std::vector<int> common;
                std::set_intersection(nb[i].begin(), nb[i].end(), nb[j].begin(), nb[j].end(),
                                      std::back_inserter(common));
                if (Rational(static_cast<std::int64_t>(common.size())) > cap) return false;
            }
        return true;
    };
    std::vector<std::vector<int>> na(m), nb(m);
    for (int i = 0; i < m; ++i) {
        na[i] = p.nbrA(i);
        nb[i] = p.nbrB(i);
    }
    f.reg2 = codeg_ok(na) && codeg_ok(nb);
    f.reg3 = Rational(p.max_degree()) <= c * m;
    f.reg4 = Rational(p.min_degree()) >= dstar * m;
    return f;
}

PartitionReport check_superregular_partition(const MultiGraph& g, const ClusterPartition& part, const Rational& eps,
                                             const Rational& d, bool equalised,
                                             const std::vector<std::pair<int, int>>& reduced,
                                             const std::vector<char>* alive, std::uint64_t seed) {
    PartitionReport rep;
    std::vector<int> idx;
    try {
        idx = cluster_index(part, g.n());
    } catch (const std::exception& e) {
        rep.srp[0] = {false, e.what()};
        return rep;
    }
    int k = part.k(), m = part.m();
    for (int i = 0; i < k; ++i)
        if (static_cast<int>(part.clusters[i].size()) != m) {
            rep.srp[0] = {false, "cluster " + std::to_string(i + 1) + " has size " +
                                     std::to_string(part.clusters[i].size()) + " != " + std::to_string(m)};
            break;
        }
    if (Rational(static_cast<std::int64_t>(part.V0.size())) > eps * g.n())
        rep.srp[1] = {false, "|V0| = " + std::to_string(part.V0.size()) + " exceeds eps n"};
    for (const auto& e : g.edges()) {
        if (alive && !(*alive)[e.id]) continue;
        if (idx[e.u] >= 0 && idx[e.u] == idx[e.v]) {
            rep.srp[2] = {false, "edge " + std::to_string(e.id) + " inside cluster " + std::to_string(idx[e.u] + 1)};
            break;
        }
    }
    auto counts = reduced_counts(g, part, alive);
    std::vector<std::pair<int, int>> R;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (counts[i][j] > 0) R.emplace_back(i, j);
    if (!reduced.empty()) {
        std::vector<std::pair<int, int>> want;
        for (auto [a, b] : reduced) want.emplace_back(std::min(a, b), std::max(a, b));
        std::sort(want.begin(), want.end());
        if (want != R) rep.srp[3] = {false, "reduced graph differs from the declared one"};
    }
    ClusterPartition sup = part;
    if (!part.frozen) derive_support(g, sup, alive);
    std::optional<int> mprime;
    if (equalised && part.m_prime > 0) mprime = part.m_prime;
    for (auto [i, j] : R) {
        auto Vij = sup.support.count({i, j}) ? sup.support.at({i, j}) : std::vector<Vertex>{};
        auto Vji = sup.support.count({j, i}) ? sup.support.at({j, i}) : std::vector<Vertex>{};
        std::string tag = "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        if (rep.srp[4].ok) {
            if (Rational(static_cast<std::int64_t>(Vij.size())) < (1 - eps) * m ||
                Rational(static_cast<std::int64_t>(Vji.size())) < (1 - eps) * m)
                rep.srp[4] = {false, tag + ": support cluster smaller than (1-eps)m"};
            else {
                auto bp = BipartitePair::from_graph(g, Vij, Vji, alive);
                auto sr = check_superregular_at_least(bp, eps, d, RegMode::Auto, seed + i * 131 + j);
                if (!sr.ok) rep.srp[4] = {false, tag + ": " + sr.failure};
            }
        }
        if (equalised && rep.srp[5].ok) {
            if (!mprime) mprime = static_cast<int>(Vij.size());
            if (static_cast<int>(Vij.size()) != *mprime || static_cast<int>(Vji.size()) != *mprime)
                rep.srp[5] = {false, tag + ": support sizes differ from m' = " + std::to_string(*mprime)};
        }
    }
    if (equalised && rep.srp[5].ok && mprime && Rational(*mprime) < (1 - eps) * m)
        rep.srp[5] = {false, "m' below (1-eps)m"};
    return rep;
}

Rational root_floor(const Rational& eps, int k) {
    if (k < 1 || eps <= 0) throw std::invalid_argument("root_floor: needs k >= 1 and eps > 0");
    constexpr std::int64_t kDen = 1000000;
    long double le = std::log(static_cast<long double>(eps.numerator())) -
                     std::log(static_cast<long double>(eps.denominator()));
    std::int64_t num = static_cast<std::int64_t>(std::floor(std::exp(le / k) * kDen));
    auto fits = [&](std::int64_t q) {
        if (q <= 0) return true;
        boost::multiprecision::cpp_int lhs = boost::multiprecision::pow(boost::multiprecision::cpp_int(q), k);
        boost::multiprecision::cpp_int rhs = boost::multiprecision::pow(boost::multiprecision::cpp_int(kDen), k);
        return lhs * eps.denominator() <= rhs * eps.numerator();
    };
    while (num > 0 && !fits(num)) --num;
    while (fits(num + 1)) ++num;
    return Rational(num, kDen);
}

Rational sqrt_floor(const Rational& x) { return root_floor(x, 2); }

namespace {

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

EdgeSplit split_edges(const BipartitePair& p, const Rational& eps, const std::vector<Rational>& targets, Rng& rng,
                      bool verify) {
    Rational d = density(p);
    Rational sum = 0;
    for (const auto& t : targets) {
        if (t <= 0) throw std::invalid_argument("slice densities must be positive");
        sum += t;
    }
    if (sum > d) throw std::invalid_argument("sum of slice densities " + to_string(sum) + " exceeds density " + to_string(d));
    std::vector<Rational> probs;
    std::int64_t D = 1;
    for (const auto& t : targets) {
        probs.push_back(t / d);
        D = lcm64(D, probs.back().denominator());
    }
    std::vector<std::int64_t> cum;
    std::int64_t acc = 0;
    for (const auto& pr : probs) {
        acc += pr.numerator() * (D / pr.denominator());
        cum.push_back(acc);
    }
    bool dense_checks = verify && std::min(p.mA(), p.mB()) >= kSizeFloor;
    SuperregularReport input;
    bool input_super = false, input_regular = false;
    Rational eps12 = root_floor(eps, 12);
    if (dense_checks) {
        input = check_superregular(p, eps, d);
        input_super = input.ok;
        input_regular = input.regularity.regular;
    }
    EdgeSplit out;
    std::string last;
    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        out.attempts = attempt;
        out.slices.assign(targets.size() + 1, {});
        for (int i = 0; i < static_cast<int>(p.e()); ++i) {
            auto u = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(D)));
            size_t s = 0;
            while (s < cum.size() && u >= cum[s]) ++s;
            out.slices[s < cum.size() ? s + 1 : 0].push_back(i);
        }
        out.checks.clear();
        bool good = true;
        if (dense_checks && (input_super || input_regular)) {
            for (size_t s = 0; s < targets.size() && good; ++s) {
                auto slice = p.with_edges(out.slices[s + 1]);
                SuperregularReport r;
                if (input_super) {
                    r = check_superregular(slice, eps12, targets[s], RegMode::Auto, rng.next());
                } else {
                    r.regularity = test_regular(slice, eps12, RegMode::Auto, rng.next());
                    Rational dev = r.regularity.density - targets[s];
                    if (dev < 0) dev = -dev;
                    r.ok = r.regularity.regular && dev <= eps12;
                    if (!r.ok) r.failure = "slice not (eps^(1/12), d_i +- eps^(1/12))-regular";
                }
                out.checks.push_back(r);
                if (!r.ok) {
                    good = false;
                    last = "slice " + std::to_string(s + 1) + ": " + r.failure;
                }
            }
        }
        if (good) return out;
    }
    throw OperationalError("split_edges", "verification failed after " + std::to_string(kRetryBudget) +
                                              " attempts (" + last + ")");
}

VertexSplit split_vertices(const BipartitePair& p, int r, const Rational& eps, const Rational& d, const Rational& eta,
                           Rng& rng) {
    int m = p.mA();
    if (p.mB() != m) throw std::invalid_argument("split_vertices needs a balanced pair");
    if (r < 1 || r > m) throw std::invalid_argument("part count r must lie in [1, m]");
    std::vector<int> Asup, Bsup;
    for (int a = 0; a < m; ++a)
        if (p.degA(a) > 0) Asup.push_back(a);
    for (int b = 0; b < m; ++b)
        if (p.degB(b) > 0) Bsup.push_back(b);
    int mp = static_cast<int>(Asup.size());
    if (static_cast<int>(Bsup.size()) != mp) throw std::invalid_argument("support clusters are not equalised");
    if (Rational(mp) < (1 - eps) * m) throw std::invalid_argument("support smaller than (1-eps)m");
    std::vector<int> sizes(r, m / r);
    for (int i = 0; i < m % r; ++i) ++sizes[i];
    Rational eps7 = root_floor(eps, 7);
    int Delta = p.max_degree(), delta = p.min_degree();
    std::vector<char> inA(m, 0), inB(m, 0);
    for (int a : Asup) inA[a] = 1;
    for (int b : Bsup) inB[b] = 1;
    VertexSplit out;
    out.eps_checked = eps7;
    std::string last;
    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        out.attempts = attempt;
        std::vector<int> pa(m), pb(m);
        std::iota(pa.begin(), pa.end(), 0);
        std::iota(pb.begin(), pb.end(), 0);
        rng.shuffle(pa);
        rng.shuffle(pb);
        out.A_parts.assign(r, {});
        out.B_parts.assign(r, {});
        int pos = 0;
        for (int i = 0; i < r; ++i) {
            for (int t = 0; t < sizes[i]; ++t, ++pos) {
                out.A_parts[i].push_back(pa[pos]);
                out.B_parts[i].push_back(pb[pos]);
            }
            std::sort(out.A_parts[i].begin(), out.A_parts[i].end());
            std::sort(out.B_parts[i].begin(), out.B_parts[i].end());
        }
        bool good = true;
        std::vector<std::vector<int>> Xs, Ys;
        for (int i = 0; i < r && good; ++i) {
            std::vector<int> xin, xout, yin, yout;
            std::vector<char> markA(m, 0), markB(m, 0);
            for (int a : out.A_parts[i]) markA[a] = 1;
            for (int b : out.B_parts[i]) markB[b] = 1;
            for (int a : Asup) (markA[a] ? xin : xout).push_back(a);
            for (int b : Bsup) (markB[b] ? yin : yout).push_back(b);
            Rational lo = (1 - eps) * mp / r, hi = (1 + eps) * mp / r;
            for (auto sz : {xin.size(), yin.size()}) {
                Rational s(static_cast<std::int64_t>(sz));
                if (s < lo || s > hi) {
                    good = false;
                    last = "support share of part " + std::to_string(i + 1) + " outside (1+-eps)m'/r";
                }
            }
            Xs.push_back(xin);
            if (!xout.empty()) Xs.push_back(xout);
            Ys.push_back(yin);
            if (!yout.empty()) Ys.push_back(yout);
        }
        for (size_t x = 0; x < Xs.size() && good; ++x)
            for (size_t y = 0; y < Ys.size() && good; ++y) {
                if (Xs[x].empty() || Ys[y].empty()) continue;
                auto sub = p.induced(Xs[x], Ys[y]);
                auto rep = check_superregular(sub, eps7, d, RegMode::Auto, rng.next());
                if (!rep.ok) {
                    good = false;
                    last = "sub-pair not [eps^(1/7), d]-superregular: " + rep.failure;
                }
            }
        for (int i = 0; i < r && good; ++i)
            for (int j = 0; j < r && good; ++j) {
                std::vector<int> xin, yin;
                for (int a : out.A_parts[i])
                    if (inA[a]) xin.push_back(a);
                for (int b : out.B_parts[j])
                    if (inB[b]) yin.push_back(b);
                if (xin.empty() || yin.empty()) continue;
                auto sub = p.induced(xin, yin);
                if (Rational(sub.max_degree()) > (Rational(Delta) + eta * mp) / r ||
                    Rational(sub.min_degree()) < (Rational(delta) - eta * mp) / r) {
                    good = false;
                    last = "degree window of sub-pair violated";
                }
            }
        if (good) return out;
    }
    throw OperationalError("split_vertices", "verification failed after " + std::to_string(kRetryBudget) +
                                                 " attempts (" + last + ")");
}

OrientedPair orient_balanced(const BipartitePair& p, const Rational& eps, const Rational& d, Rng& rng) {
    if (p.mA() != p.mB()) throw std::invalid_argument("orient_balanced needs a balanced pair");
    OrientedPair out;
    if (p.mA() >= kSizeFloor) {
        auto pre = check_superregular(p, eps, d);
        if (!pre.ok) throw std::invalid_argument("input pair is not [eps,d]-superregular: " + pre.failure);
    }
    Rational dens = density(p);
    out.orientation.forward.assign(p.e(), 1);
    if (p.e() == 0) return out;
    Rational eps12 = root_floor(eps, 12);
    std::string last;
    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        auto split = split_edges(p, eps, {dens / 2, dens / 2}, rng, false);
        for (int i : split.slices[1]) out.orientation.forward[i] = 1;
        for (int i : split.slices[2]) out.orientation.forward[i] = 0;
        if (p.mA() < kSizeFloor) return out;
        out.ab = check_superregular(p.with_edges(split.slices[1]), eps12, d / 2, RegMode::Auto, rng.next());
        out.ba = check_superregular(p.with_edges(split.slices[2]), eps12, d / 2, RegMode::Auto, rng.next());
        if (out.ab.ok && out.ba.ok) return out;
        last = out.ab.ok ? out.ba.failure : out.ab.failure;
    }
    throw OperationalError("orient_balanced", "no orientation verified after " + std::to_string(kRetryBudget) +
                                                  " attempts (" + last + ")");
}

SparseSlice sparse_slice(const BipartitePair& p, const Rational& eps, const Rational& d, const Rational& dprime,
                         Rng& rng) {
    if (dprime > d) throw std::invalid_argument("target density d' exceeds d");
    if (dprime <= 0) throw std::invalid_argument("target density d' must be positive");
    Rational eps12 = root_floor(eps, 12), dstar = dprime / 2, c = 3 * dprime / (2 * d);
    SparseSlice out;
    if (dprime == d) {
        out.kept.resize(p.e());
        std::iota(out.kept.begin(), out.kept.end(), 0);
        out.flags = check_sparse_superregular(p, eps12, dprime, dstar, c, rng.next());
        out.attempts = 1;
        return out;
    }
    Rational prob = dprime / d;
    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        out.attempts = attempt;
        out.kept.clear();
        for (int i = 0; i < static_cast<int>(p.e()); ++i)
            if (rng.bernoulli(prob)) out.kept.push_back(i);
        out.flags = check_sparse_superregular(p.with_edges(out.kept), eps12, dprime, dstar, c, rng.next());
        if (out.flags.all()) return out;
    }
    // Fallback: random-order greedy subgraph with degrees capped at d'm and co-degrees at c^2 m.
    const int m = p.mA();
    const int t = std::max<std::int64_t>(1, floor_of(dprime * m));
    const int cocap = static_cast<int>(floor_of(c * c * m));
    for (int attempt = 1; attempt <= kRetryBudget; ++attempt) {
        ++out.attempts;
        std::vector<int> order(p.e());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        std::vector<int> dA(p.mA(), 0), dB(p.mB(), 0);
        std::vector<std::vector<int>> NA(p.mA()), NB(p.mB());
        std::vector<int> coA(static_cast<size_t>(p.mA()) * p.mA(), 0), coB(static_cast<size_t>(p.mB()) * p.mB(), 0);
        out.kept.clear();
        for (int i : order) {
            auto [a, b] = p.local_edges()[i];
            if (dA[a] >= t || dB[b] >= t || std::find(NA[a].begin(), NA[a].end(), b) != NA[a].end()) continue;
            bool fits = true;
            for (int a2 : NB[b]) fits = fits && coA[static_cast<size_t>(a) * p.mA() + a2] < cocap;
            for (int b2 : NA[a]) fits = fits && coB[static_cast<size_t>(b) * p.mB() + b2] < cocap;
            if (!fits) continue;
            for (int a2 : NB[b]) ++coA[static_cast<size_t>(a) * p.mA() + a2], ++coA[static_cast<size_t>(a2) * p.mA() + a];
            for (int b2 : NA[a]) ++coB[static_cast<size_t>(b) * p.mB() + b2], ++coB[static_cast<size_t>(b2) * p.mB() + b];
            NA[a].push_back(b);
            NB[b].push_back(a);
            ++dA[a];
            ++dB[b];
            out.kept.push_back(i);
        }
        std::sort(out.kept.begin(), out.kept.end());
        out.flags = check_sparse_superregular(p.with_edges(out.kept), eps12, dprime, dstar, c, rng.next());
        if (out.flags.all()) {
            out.greedy = true;
            return out;
        }
    }
    throw OperationalError("sparse_slice", "no sample passed Reg1-Reg4 after " + std::to_string(out.attempts) +
                                               " attempts (last flags " + std::to_string(out.flags.reg1) +
                                               std::to_string(out.flags.reg2) + std::to_string(out.flags.reg3) +
                                               std::to_string(out.flags.reg4) + ")");
}

std::string to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Holds: return "holds";
        case StabilityVerdict::Fails: return "fails";
        case StabilityVerdict::PreconditionViolated: return "precondition-violated";
        case StabilityVerdict::Vacuous: return "vacuous";
    }
    return "?";
}

StabilityReport stability_check_removal(const BipartitePair& before, const BipartitePair& after, const Rational& eps,
                                        const Rational& d, const Rational& dprime) {
    StabilityReport rep;
    int m = before.mA();
    if (before.mB() != m) throw std::invalid_argument("stability check needs a balanced pair");
    std::set<Vertex> A(before.A().begin(), before.A().end()), B(before.B().begin(), before.B().end());
    std::set<Vertex> A2(after.A().begin(), after.A().end()), B2(after.B().begin(), after.B().end());
    for (Vertex x : A2)
        if (!A.count(x)) return {StabilityVerdict::PreconditionViolated, "after.A not inside before.A"};
    for (Vertex x : B2)
        if (!B.count(x)) return {StabilityVerdict::PreconditionViolated, "after.B not inside before.B"};
    Rational budget = dprime * m;
    if (Rational(static_cast<std::int64_t>(A.size() - A2.size())) > budget ||
        Rational(static_cast<std::int64_t>(B.size() - B2.size())) > budget)
        return {StabilityVerdict::PreconditionViolated, "more than d'm vertices removed from a class"};
    std::set<EdgeId> kept(after.edge_ids().begin(), after.edge_ids().end());
    std::map<Vertex, int> removed;
    for (size_t i = 0; i < before.local_edges().size(); ++i) {
        EdgeId e = before.edge_ids()[i];
        Vertex a = before.A()[before.local_edges()[i].first], b = before.B()[before.local_edges()[i].second];
        bool survives_vertices = A2.count(a) && B2.count(b);
        if (kept.count(e)) {
            if (!survives_vertices) return {StabilityVerdict::PreconditionViolated, "after keeps an edge of a removed vertex"};
            continue;
        }
        if (survives_vertices) {
            ++removed[a];
            ++removed[b];
        }
    }
    std::set<EdgeId> had(before.edge_ids().begin(), before.edge_ids().end());
    for (EdgeId e : after.edge_ids())
        if (!had.count(e))
            return {StabilityVerdict::PreconditionViolated, "after has an edge not in before"};
    for (auto [x, c] : removed)
        if (Rational(c) > budget)
            return {StabilityVerdict::PreconditionViolated,
                    "vertex " + std::to_string(x) + " lost " + std::to_string(c) + " edges, more than d'm"};
    if (eps > dprime || dprime > d) return {StabilityVerdict::Vacuous, "needs eps <= d' <= d"};
    if (m < kSizeFloor) return {StabilityVerdict::Vacuous, "below size floor"};
    auto reg = test_regular(before, eps);
    if (!reg.regular || reg.density < d) return {StabilityVerdict::Vacuous, "before is not (eps, >= d)-regular"};
    if (after.mA() == 0 || after.mB() == 0) return {StabilityVerdict::Fails, "after has an empty side"};
    Rational eps2 = 2 * sqrt_floor(dprime);
    if (eps2 > 1) eps2 = 1;
    auto r2 = test_regular(after, eps2);
    if (!r2.regular) return {StabilityVerdict::Fails, "after is not 2 sqrt(d')-regular"};
    if (r2.density < d - eps2) return {StabilityVerdict::Fails, "after density below d - 2 sqrt(d')"};
    auto sup = check_superregular(before, eps, d);
    if (sup.ok) {
        auto s2 = check_superregular(after, eps2, d);
        if (!s2.degrees_ok) return {StabilityVerdict::Fails, "superregular variant: " + s2.failure};
    }
    rep.verdict = StabilityVerdict::Holds;
    return rep;
}

}  // namespace pcd

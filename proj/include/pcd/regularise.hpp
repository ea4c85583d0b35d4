#pragma once

#include <string>
#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"
#include "pcd/hamdecomp.hpp"
#include "pcd/regularity.hpp"

namespace pcd {

// Per-vertex parity of the degree into every cluster, with the oddity totals.
class OddityLedger {
public:
    OddityLedger(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>* alive = nullptr);
    void remove_edge(const MultiGraph& g, EdgeId e);
    int oddity(Vertex x) const { return odd_count_[x]; }
    bool odd_into(Vertex x, int j) const { return parity_[static_cast<size_t>(x) * k_ + j] != 0; }
    int total() const { return total_; }        // O(H)
    int positive() const { return positive_; }  // N(H)
    std::vector<Vertex> support() const;        // S(H), ascending
    bool operator==(const OddityLedger& o) const;

private:
    void flip(Vertex x, int j);
    int k_ = 0;
    std::vector<int> cluster_;
    std::vector<char> parity_;
    std::vector<int> odd_count_;
    int total_ = 0, positive_ = 0;
};

int oddity(const MultiGraph& g, const ClusterPartition& part, Vertex x, const std::vector<char>* alive = nullptr);

// 20k^2/d + 21k/2 + 25k^4(k-1)
Rational eulerianise_bound(const Rational& d, int k);

struct OddityStep {
    int step = 0;          // 1, 2 or 3
    std::string kind;      // how the cycle was closed: "long", "covered", "greedy"
    int length = 0;
    int O_before = 0, O_after = 0;
    int N_before = 0, N_after = 0;
    int case_1a = 0, case_1b = 0;
};

struct EulerianiseResult {
    std::vector<char> alive;  // edges of g'
    std::vector<Walk> removed;
    std::vector<OddityStep> trace;
    Rational bound;           // c(d, k)
    int long_threshold = 0;   // length at which Step 1 closes its walk
    bool threshold_adjusted = false;  // dm'/4 below 4 at this scale
    std::vector<std::string> notes;
};

struct EulerianiseOptions {
    bool verify_partition = false;  // run the superregular partition check on entry
    Rational eps = Rational(1, 10);
};

EulerianiseResult eulerianise_pairs(const MultiGraph& g, const ClusterPartition& part, const Rational& d, Rng& rng,
                                    const EulerianiseOptions& opt = {});

struct RegulariseResult {
    std::vector<EdgeId> kept;  // edge ids of H
    std::vector<PairCycle> removed;
    int r = 0;
    int theta = 0;
    int max_degree = 0;
    int attempts = 0;  // Hamilton searches across all iterations
    std::vector<std::string> trace;
};

// p Eulerian and balanced with Delta - delta <= eta m.
RegulariseResult regularise_pair(const BipartitePair& p, Rng& rng, const Rational& eta = Rational(1, 3));

struct GraphEulerianiseResult {
    std::vector<char> alive;
    std::vector<Walk> removed;  // paths with odd endpoints
    int matching_paths = 0, cherry_paths = 0, long_paths = 0;
    int removed_edges = 0;
    Rational alpha;
    Rational edge_budget;   // odd/2 * 2 + 5/alpha^2
    int max_long_length = 0;
    Rational long_length_cap;  // 5/alpha
};

// alpha <= 0 means alpha = delta(g)/n.
GraphEulerianiseResult eulerianise_graph(const MultiGraph& g, Rational alpha = Rational(0));

}  // namespace pcd

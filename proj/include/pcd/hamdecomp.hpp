#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"
#include "pcd/regularity.hpp"

namespace pcd {

// Closed cycle inside a pair: edges[i] joins vertices[i] and vertices[(i + 1) % L].
// Vertex labels are the pair's labels (p.A(), p.B()); edge ids are p.edge_ids() entries.
struct PairCycle {
    std::vector<Vertex> vertices;
    std::vector<EdgeId> edges;
};

struct HamiltonOptions {
    int restarts_per_vertex = 50;  // restart budget 50 m
    int exhaustive_limit = 16;     // exact search when the vertex count is at most this
};

// Hamilton cycle of a balanced pair. Throws OperationalError when the budget is spent
// or when exhaustive search proves none exists.
PairCycle bipartite_hamilton(const BipartitePair& p, Rng& rng, const HamiltonOptions& opt = {});
std::string check_pair_cycle(const BipartitePair& p, const PairCycle& c, bool spanning);

struct PairMatching {
    bool perfect = false;
    std::vector<int> mate_a;           // a local -> b local, -1 if unmatched
    std::vector<int> edge_pos;         // a local -> edge position, -1 if unmatched
    std::vector<Vertex> hall_violator; // A labels S with |N(S)| < |S| when not perfect
    std::vector<Vertex> hall_neighbours;
};

PairMatching bipartite_perfect_matching(const BipartitePair& p);

// r perfect matchings (lists of edge positions) partitioning an r-regular pair.
std::vector<std::vector<int>> regular_bipartite_matching_decomposition(const BipartitePair& p);

struct MatchingChain {
    std::vector<std::vector<Vertex>> clusters;  // V_1..V_k
    std::vector<std::vector<EdgeId>> matchings; // M_i perfect between V_i and V_{i+1}
};

struct ClosingResult {
    std::vector<EdgeId> matching;   // M inside the closing pair
    Walk cycle;                     // Hamilton cycle on all clusters
    std::vector<int> cycle_counts;  // permutation cycle count before and after every swap
    bool exhaustive = false;
};

constexpr int kClosingExhaustiveM = 8;
constexpr long kMatchingEnumerationCap = 200000;

// p has one side equal to V_1 and the other to V_k.
ClosingResult close_matchings_to_hamilton(const MultiGraph& g, const MatchingChain& chain, const BipartitePair& p);
std::string check_chain(const MultiGraph& g, const MatchingChain& chain);

struct PackingResult {
    std::vector<PairCycle> cycles;
    int target = 0;               // floor((d - 19 eps) m / 2), at least 0
    bool covers_all_edges = false;
    int attempts = 1;
};

PackingResult hamilton_packing(const BipartitePair& p, const Rational& eps, const Rational& d, Rng& rng,
                               const HamiltonOptions& opt = {});

// t vertex-disjoint cycles with one vertex in each cluster; clusters listed in cycle order.
std::vector<Walk> disjoint_cycles_through_clusters(const MultiGraph& g, const std::vector<std::vector<Vertex>>& clusters,
                                                   int t);

struct ApproxDecompOptions {
    int gamma_matchings = 2;  // Gamma_i as this many perfect matchings of G_i
    bool gamma_sparse = false;
    Rational dprime = Rational(0);
};

struct ApproxDecompResult {
    std::vector<Walk> cycles;          // D
    std::vector<EdgeId> H;             // every edge not on a cycle of D
    std::vector<EdgeId> surgery;       // parity surgery edges (subset of H)
    std::vector<EdgeId> trimmed;       // regularisation and trimming edges (subset of H)
    std::vector<std::vector<EdgeId>> gamma;  // Gamma_i per pair, as selected
    int r = 0, h = 0;
    int attempts = 0;
    std::vector<std::string> trace;
};

// g restricted to the clusters is a blow-up of the cycle V_1..V_k with every pair (d m)-regular.
ApproxDecompResult approx_decompose_blowup(const MultiGraph& g, const ClusterPartition& part, int r, Rng& rng,
                                           const ApproxDecompOptions& opt = {});

// Empty string when D is h edge-disjoint Hamilton cycles of g - V0 and D, H partition E(g)
// with H[V_i, V_{i+1}] r-regular.
std::string verify_approx_decomposition(const MultiGraph& g, const ClusterPartition& part,
                                        const ApproxDecompResult& res);

// Odd-vertex segment surgery along a Hamilton cycle of the pair; returns removed edge ids.
std::vector<EdgeId> parity_surgery(const BipartitePair& p, Rng& rng);

}  // namespace pcd

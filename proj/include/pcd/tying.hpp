#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"
#include "pcd/regularity.hpp"

namespace pcd {

struct PairPath {
    std::vector<Vertex> vertices;
    std::vector<EdgeId> edges;
};

// Path of length <= 3 (opposite sides) or <= 4 (same side) inside the pair, internal vertices avoiding `forbidden`.
PairPath short_path_in_pair(const BipartitePair& p, Vertex x, Vertex y, const std::set<Vertex>& forbidden);

struct TieCaps {
    int endpoint_per_pair = 1;    // link paths ending at a vertex inside one pair (eps^(1/2) m)
    int internal_per_vertex = 1;  // link paths through a vertex (eps^(1/4) m)
    int pair_per_forest = 1;      // tie_many link paths of one forest in one pair (sqrt(zeta) m / 4)
    std::vector<std::string> floors;  // caps that were raised to 1
};

TieCaps default_caps(const Rational& eps, const Rational& zeta, int m);

struct LinkRecord {
    int forest = 0;
    std::string stage;
    std::vector<Vertex> vertices;
    std::vector<EdgeId> edges;
};

using PairKey = std::pair<int, int>;  // clusters, smaller first

class TieBudget {
public:
    TieBudget() = default;
    TieBudget(TieCaps caps, std::vector<int> cluster_of);
    bool fits(const LinkRecord& r) const;
    void charge(const LinkRecord& r);
    bool within_caps() const;
    bool same_counters(const TieBudget& o) const;
    const TieCaps& caps() const { return caps_; }
    int through(Vertex x) const;

    std::map<std::pair<Vertex, PairKey>, int> endpoint_use;
    std::map<Vertex, int> through_use;
    std::map<std::pair<PairKey, int>, int> pair_forest_use;  // (pair, forest)

private:
    void apply(const LinkRecord& r, std::map<std::pair<Vertex, PairKey>, int>& ep, std::map<Vertex, int>& in,
               std::map<std::pair<PairKey, int>, int>& pf) const;
    TieCaps caps_;
    std::vector<int> cluster_;
};

// Counters recomputed from a trace alone.
TieBudget recount_budget(const TieCaps& caps, const std::vector<int>& cluster_of, const std::vector<LinkRecord>& trace);

// Shared state for a chain of tying calls: which host edges may still be used for links.
struct TieContext {
    const MultiGraph& g;
    const ClusterPartition& part;
    std::vector<int> cluster_of;
    std::vector<char> gamma;        // Gamma edges still free
    std::vector<char> gamma_prime;  // bridge edges still free (closing mode)
    TieBudget budget;
    std::vector<LinkRecord> trace;
    int gamma_prime_cap = 1;        // eps m per vertex per pair
    std::map<std::pair<Vertex, PairKey>, int> gamma_prime_use;
    int forest_base = 0;            // added to forest indices in the trace and budget

    TieContext(const MultiGraph& g, const ClusterPartition& part, std::vector<char> gamma, TieCaps caps,
               std::vector<char> gamma_prime = {});
};

struct TieResult {
    std::vector<LinearForest> forests;        // tied paths per forest
    std::vector<std::vector<EdgeId>> used;    // link edges per forest
};

// Merge paths of every forest until each cluster hosts at most floor(2 / beta^2) endpoints per forest.
TieResult tie_many(TieContext& ctx, const std::vector<LinearForest>& forests, const Rational& beta, const Rational& zeta);
// Merge paths until every component of the reduced graph of Gamma hosts endpoints of at most one path per forest.
TieResult tie_few(TieContext& ctx, const std::vector<LinearForest>& forests);

struct CloseResult {
    std::vector<Walk> cycles;  // one per forest
    std::vector<std::vector<EdgeId>> used;
    int bridge_edges = 0;
};
// One cycle per forest. With use_bridges the Gamma' edges of ctx may link components of Gamma.
CloseResult close_into_cycles(TieContext& ctx, const std::vector<LinearForest>& forests, bool use_bridges = false);

struct SparseCover {
    std::vector<Walk> cycles;
    std::vector<EdgeId> leftover;
    std::vector<EdgeId> gamma_used;
    int leftover_cap = 0;  // floor(1 / beta^2)
    Rational cycle_budget; // beta n
    int colour_classes = 0;
    int pieces = 0;
};
// H lists host edge ids; Delta(H) <= dcap n is required.
SparseCover cover_sparse_leftover(TieContext& ctx, const std::vector<EdgeId>& H, const Rational& beta,
                                  const Rational& zeta, const Rational& dcap, Rng& rng);

struct MatchingTieResult {
    std::vector<Walk> cycles;
    std::vector<LinkRecord> links;
    std::vector<int> tie_incidence;  // per vertex, tie edges incident to it
    int max_incidence = 0;
};
// Cycle blow-up with k even; each set holds paths inside consecutive pairs with an endpoint on each side.
MatchingTieResult matching_tie_blowup(const MultiGraph& g, const ClusterPartition& part,
                                      const std::vector<std::vector<Walk>>& sets);

}  // namespace pcd

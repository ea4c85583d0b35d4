#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcd/graph.hpp"

namespace pcd {

constexpr int kOracleEdgeCap = 16;

enum class PartKinds { PathsAndCycles, CyclesOnly, PathsOnly };

struct OracleResult {
    int count = 0;
    Decomposition witness;
    std::int64_t states = 0;  // memo entries explored
};

// Exact minimum decompositions by search over "part containing the lowest remaining edge",
// memoised on the remaining-edge bitset.
OracleResult min_decomposition(const MultiGraph& g, PartKinds kinds, int edge_cap = kOracleEdgeCap);

OracleResult min_path_cycle_count(const MultiGraph& g, int edge_cap = kOracleEdgeCap);
OracleResult min_cycle_count(const MultiGraph& g, int edge_cap = kOracleEdgeCap);   // g Eulerian
OracleResult min_path_count(const MultiGraph& g, int edge_cap = kOracleEdgeCap);    // g connected

// All simple graphs on n vertices up to isomorphism (n <= 7), by canonical edge-mask.
std::vector<MultiGraph> nonisomorphic_graphs(int n);
bool is_connected(const MultiGraph& g);

struct TheoremAudit {
    std::string name;
    std::string bound;  // the compared formula
    int max_n = 0;
    int graphs = 0;      // graphs the statement applies to
    int violations = 0;
    int strict_violations = 0;  // against the sharper floor((n-1)/2), cycles only
    int worst_slack = 0;        // min over graphs of bound - oracle
};

// Exhaustive over isomorphism classes on 1..max_n vertices.
TheoremAudit audit_path_cycle_bound(int max_n);  // min paths+cycles <= floor(n/2)
TheoremAudit audit_cycle_bound(int max_n);       // Eulerian: min cycles <= floor(n/2)
TheoremAudit audit_path_bound(int max_n);        // connected: min paths <= ceil(n/2)

// Minimum proper edge colouring by backtracking; tiny graphs only.
int chromatic_index_bruteforce(const MultiGraph& g);

}  // namespace pcd

#pragma once

#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"

namespace pcd {

MultiGraph complete_graph(int n);
MultiGraph cycle_graph(int n);
MultiGraph path_graph(int n);
MultiGraph complete_bipartite(int a, int b);  // A = 0..a-1, B = a..a+b-1
MultiGraph gnp(int n, const Rational& p, Rng& rng);
// Multigraph with the given number of edges drawn uniformly over pairs, multiplicity at most max_mult.
MultiGraph random_multigraph(int n, int m, int max_mult, Rng& rng);

// Bipartite edge lists on local indices (a, b), a, b in [0, m).
std::vector<std::pair<int, int>> random_bipartite(int mA, int mB, const Rational& p, Rng& rng);
std::vector<std::pair<int, int>> random_regular_bipartite(int m, int r, Rng& rng);
// Random r-regular pair plus `cycles` added cycles on random vertex subsets (non-edges preferred);
// every degree stays even when r is, and Delta - delta <= 2 * cycles.
std::vector<std::pair<int, int>> near_regular_pair(int m, int r, int cycles, Rng& rng);

// Two disjoint cliques K_n plus `matchings` edge-disjoint perfect matchings between s-subsets.
MultiGraph two_cliques(int n, int s, int matchings);
// K_m with a star of l leaves; leaf 0 of the star is clique vertex 0.
MultiGraph clique_star(int m, int l);
// K_m with t pendant triangles, triangle i sharing clique vertex i.
MultiGraph clique_triangles(int m, int t);

struct BlowupInstance {
    MultiGraph g;
    ClusterPartition part;
    std::vector<std::pair<int, int>> reduced;  // cluster pairs i < j
    int pair_degree = 0;                       // d*m, per-pair regular degree
};

// Cycle reduced graph V_1..V_k, each consecutive pair a random (d m)-regular bipartite graph.
BlowupInstance blowup_cycle(int k, int m, const Rational& d, Rng& rng);

// Toggle a random matching between s-subsets of consecutive clusters along the cycle; stays Eulerian.
BlowupInstance inject_parity_defects(const BlowupInstance& inst, int s, Rng& rng);

}  // namespace pcd

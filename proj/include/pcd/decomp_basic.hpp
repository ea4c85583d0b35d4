#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pcd/graph.hpp"

namespace pcd {

// Cycles partitioning the alive edges (all edges when alive is null). Throws if some vertex has odd degree.
std::vector<Walk> euler_split(const MultiGraph& g, const std::vector<char>* alive = nullptr);

// A cycle through edge e within the alive edges, which must form an Eulerian graph.
Walk cycle_through_edge(const MultiGraph& g, EdgeId e, const std::vector<char>* alive = nullptr);

// Shortest path (fewest edges) between s and t over alive edges, avoiding vertices marked in `blocked`
// (s and t themselves are allowed). Returns edges in order from s.
std::optional<std::vector<EdgeId>> bfs_path(const MultiGraph& g, Vertex s, Vertex t, const std::vector<char>& alive,
                                            const std::vector<char>* blocked = nullptr, int max_len = -1);

struct GreedyResult {
    Decomposition decomposition;
    bool within_lovasz_bound = false;  // paths + cycles <= floor(n/2)
};
GreedyResult greedy_path_cycle_decomposition(const MultiGraph& g);

constexpr size_t kLocalTripleLimit = 40;
// Re-solve unions of two or three touching parts exactly; accepted only if the part count drops
// and the path count is unchanged.
void improve_locally(const MultiGraph& g, Decomposition& d, int edge_cap = 12);

struct EdgeColoring {
    std::vector<int> color;  // per edge id
    int palette = 0;         // number of colours used
    int bound = 0;           // Delta + mu
};

EdgeColoring vizing_color(const MultiGraph& g);
bool is_proper_coloring(const MultiGraph& g, const EdgeColoring& c);
std::vector<std::vector<EdgeId>> color_classes(const EdgeColoring& c);

struct MatchingBundle {
    std::vector<std::vector<EdgeId>> even_matchings;
    std::vector<Walk> short_parts;  // paths of length 2 and 2-cycles
    int matching_cap = 0;           // ceil(3(Delta+mu)/2)
    int short_cap = 0;              // ceil((Delta+mu)/2)
};

MatchingBundle even_matching_decomposition(const MultiGraph& g);
std::string check_matching_bundle(const MultiGraph& g, const MatchingBundle& b);

// e_i in Mi and e_j in Mj sharing no vertex; both classes odd-sized with at most one of size 1.
std::pair<EdgeId, EdgeId> vertex_disjoint_pair_from_odd_classes(const MultiGraph& g, const std::vector<EdgeId>& Mi,
                                                                const std::vector<EdgeId>& Mj);

bool is_matching(const MultiGraph& g, const std::vector<EdgeId>& edges);

}  // namespace pcd

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcd {

using Vertex = int;
using EdgeId = int;

struct Edge {
    EdgeId id;
    Vertex u;
    Vertex v;
    Vertex other(Vertex x) const { return x == u ? v : u; }
};

// Undirected multigraph on vertices [0, n). Edge ids are dense and stable.
class MultiGraph {
public:
    MultiGraph() = default;
    MultiGraph(int n, const std::vector<std::pair<int, int>>& edges);

    int n() const { return n_; }
    int m() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgeId>& incident(Vertex x) const { return adj_.at(x); }
    int degree(Vertex x) const { return static_cast<int>(adj_.at(x).size()); }

    int max_multiplicity() const;
    int multiplicity(Vertex x, Vertex y) const;
    std::vector<std::pair<int, int>> edge_list() const;
    bool adjacency_consistent() const;

    // Graph on the same vertex set keeping only `ids`; new ids follow the order of `ids`.
    // origin[new id] = old id.
    MultiGraph edge_subgraph(const std::vector<EdgeId>& ids, std::vector<EdgeId>* origin = nullptr) const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> adj_;
};

struct DegreeStats {
    int max_degree = 0;
    int min_degree = 0;
    std::vector<Vertex> odd;
    bool eulerian() const { return odd.empty(); }
};

DegreeStats degree_stats(const MultiGraph& g);

// Degrees counting only edges with alive[e] != 0.
std::vector<int> masked_degrees(const MultiGraph& g, const std::vector<char>& alive);

enum class WalkKind { Path, Cycle };

// vertices has edges.size()+1 entries; edges[i] joins vertices[i] and vertices[i+1].
// For a cycle, vertices.front() == vertices.back().
struct Walk {
    WalkKind kind = WalkKind::Path;
    std::vector<EdgeId> edges;
    std::vector<Vertex> vertices;

    int length() const { return static_cast<int>(edges.size()); }
    Vertex front() const { return vertices.front(); }
    Vertex back() const { return vertices.back(); }
};

// Build a walk from a start vertex and an edge sequence; throws if the edges do not chain.
Walk walk_from_edges(const MultiGraph& g, WalkKind kind, Vertex start, const std::vector<EdgeId>& edges);
// Empty string when valid, else a description of the problem.
std::string check_walk(const MultiGraph& g, const Walk& w);
Walk reversed(const Walk& w);

struct Decomposition {
    std::vector<Walk> parts;
    std::vector<EdgeId> leftover;
};

struct VerifyReport {
    bool valid = true;
    int paths = 0;
    int cycles = 0;
    int leftover = 0;
    std::string violation;
};

VerifyReport verify_decomposition(const MultiGraph& g, const Decomposition& d);

struct LinearForest {
    std::vector<Walk> paths;
};

bool is_linear_forest(const MultiGraph& g, const LinearForest& f, std::string* why = nullptr);

struct ClusterPartition {
    std::vector<Vertex> V0;
    std::vector<std::vector<Vertex>> clusters;
    // (i, j) -> V_ij, the vertices of cluster i with a neighbour in cluster j.
    std::map<std::pair<int, int>, std::vector<Vertex>> support;
    int m_prime = 0;
    bool frozen = false;

    int k() const { return static_cast<int>(clusters.size()); }
    int m() const { return clusters.empty() ? 0 : static_cast<int>(clusters.front().size()); }
};

// cluster index per vertex, -1 for V0. Throws if the partition does not cover [0, n) exactly.
std::vector<int> cluster_index(const ClusterPartition& p, int n);
std::string check_partition(const ClusterPartition& p, int n);

// Recompute support clusters from the edges (alive mask optional).
void derive_support(const MultiGraph& g, ClusterPartition& p, const std::vector<char>* alive = nullptr);
// k x k matrix of edge counts between clusters.
std::vector<std::vector<int>> reduced_counts(const MultiGraph& g, const ClusterPartition& p,
                                             const std::vector<char>* alive = nullptr);
// Component label per cluster of the reduced graph given by counts > 0.
std::vector<int> reduced_components(const std::vector<std::vector<int>>& counts);

struct Orientation {
    // forward[e] true means edge(e).u -> edge(e).v
    std::vector<char> forward;
};

std::vector<std::vector<Vertex>> connected_components(const MultiGraph& g, const std::vector<char>* alive = nullptr);

}  // namespace pcd

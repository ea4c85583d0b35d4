#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"

namespace pcd {

// Bipartite view (A, B, edges). Local indices: a in [0, mA), b in [0, mB).
class BipartitePair {
public:
    BipartitePair() = default;
    static BipartitePair from_graph(const MultiGraph& g, std::vector<Vertex> A, std::vector<Vertex> B,
                                    const std::vector<char>* alive = nullptr);
    // Vertices of the standalone pair are 0..mA-1 (A) and mA..mA+mB-1 (B); edge ids follow input order.
    static BipartitePair from_local(int mA, int mB, const std::vector<std::pair<int, int>>& local_edges);
    // Keep only the listed edge positions (indices into edges()).
    BipartitePair with_edges(const std::vector<int>& keep) const;
    BipartitePair induced(const std::vector<int>& a_local, const std::vector<int>& b_local) const;

    int mA() const { return static_cast<int>(A_.size()); }
    int mB() const { return static_cast<int>(B_.size()); }
    std::int64_t e() const { return static_cast<std::int64_t>(edges_.size()); }
    const std::vector<Vertex>& A() const { return A_; }
    const std::vector<Vertex>& B() const { return B_; }
    const std::vector<EdgeId>& edge_ids() const { return edges_; }
    const std::vector<std::pair<int, int>>& local_edges() const { return local_; }
    int count(int a, int b) const { return cnt_[static_cast<size_t>(a) * mB() + b]; }
    int degA(int a) const { return degA_[a]; }
    int degB(int b) const { return degB_[b]; }
    const std::vector<int>& nbrA(int a) const { return nbrA_[a]; }
    const std::vector<int>& nbrB(int b) const { return nbrB_[b]; }
    int max_degree() const;
    int min_degree() const;
    // Standalone multigraph on mA+mB vertices whose edge ids equal positions in edge_ids().
    MultiGraph to_graph() const;

private:
    void index();
    std::vector<Vertex> A_, B_;
    std::vector<EdgeId> edges_;
    std::vector<std::pair<int, int>> local_;
    std::vector<int> cnt_, degA_, degB_;
    std::vector<std::vector<int>> nbrA_, nbrB_;
};

enum class RegMode { Auto, Exhaustive, Sampled, CodegreeCertificate };
std::string to_string(RegMode m);

constexpr int kExhaustiveCap = 24;
constexpr int kSampleCount = 200;
constexpr int kSizeFloor = 4;

struct RegularityWitness {
    std::vector<Vertex> A1;
    std::vector<Vertex> B1;
    Rational density;
};

struct RegularityReport {
    Rational density;
    RegMode mode = RegMode::Exhaustive;
    Rational epsilon;
    bool regular = false;
    int samples = 0;
    std::optional<RegularityWitness> witness;
};

Rational density(const BipartitePair& p);
RegularityReport test_regular(const BipartitePair& p, const Rational& eps, RegMode mode = RegMode::Auto,
                              std::uint64_t seed = 1);

// Independent re-evaluation of a witness against the definition.
bool witness_violates(const BipartitePair& p, const RegularityWitness& w, const Rational& eps);

struct CodegreeCertificate {
    bool certified = false;
    bool precondition = false;  // eps << d, taken as 2 eps <= d
    int low_degree_vertices = 0;
    std::int64_t heavy_pairs = 0;
    double implied_epsilon = 0;  // 2 * eps^(1/6)
    std::string exponent = "1/6";
};
CodegreeCertificate certify_regular_codegree(const BipartitePair& p, const Rational& eps);

struct SuperregularReport {
    bool ok = false;
    bool vacuous = false;  // regularity sub-check skipped below the size floor
    bool degrees_ok = false;
    RegularityReport regularity;
    std::string failure;
};
SuperregularReport check_superregular(const BipartitePair& p, const Rational& eps, const Rational& d,
                                      RegMode mode = RegMode::Auto, std::uint64_t seed = 1);
// [eps, >= d]: some d' >= d makes the degree window hold.
SuperregularReport check_superregular_at_least(const BipartitePair& p, const Rational& eps, const Rational& d,
                                               RegMode mode = RegMode::Auto, std::uint64_t seed = 1);

struct SparseFlags {
    bool reg1 = false, reg2 = false, reg3 = false, reg4 = false;
    bool all() const { return reg1 && reg2 && reg3 && reg4; }
    RegMode reg1_mode = RegMode::Exhaustive;
};
SparseFlags check_sparse_superregular(const BipartitePair& p, const Rational& eps, const Rational& d,
                                      const Rational& dstar, const Rational& c, std::uint64_t seed = 1);

struct ClauseResult {
    bool ok = true;
    std::string detail;
};
struct PartitionReport {
    std::array<ClauseResult, 6> srp;  // SRP1..SRP6
    bool ok() const {
        for (const auto& c : srp)
            if (!c.ok) return false;
        return true;
    }
};
// `reduced` lists the expected reduced-graph edges (i < j); empty means "derive from g".
PartitionReport check_superregular_partition(const MultiGraph& g, const ClusterPartition& part, const Rational& eps,
                                             const Rational& d, bool equalised,
                                             const std::vector<std::pair<int, int>>& reduced = {},
                                             const std::vector<char>* alive = nullptr, std::uint64_t seed = 1);

// Largest rational with 6 decimals not exceeding eps^(1/k); used for relaxed parameters.
Rational root_floor(const Rational& eps, int k);
Rational sqrt_floor(const Rational& x);

struct EdgeSplit {
    std::vector<std::vector<int>> slices;  // slice 0 is the remainder; entries are edge positions
    std::vector<SuperregularReport> checks;
    int attempts = 0;
};
EdgeSplit split_edges(const BipartitePair& p, const Rational& eps, const std::vector<Rational>& targets, Rng& rng,
                      bool verify = true);

struct VertexSplit {
    std::vector<std::vector<int>> A_parts, B_parts;  // local indices
    int attempts = 0;
    Rational eps_checked;
};
VertexSplit split_vertices(const BipartitePair& p, int r, const Rational& eps, const Rational& d, const Rational& eta,
                           Rng& rng);

struct OrientedPair {
    Orientation orientation;  // indexed by position in p.edge_ids(); forward = A -> B
    SuperregularReport ab, ba;
};
OrientedPair orient_balanced(const BipartitePair& p, const Rational& eps, const Rational& d, Rng& rng);

struct SparseSlice {
    std::vector<int> kept;  // edge positions
    SparseFlags flags;
    int attempts = 0;
    bool greedy = false;  // sampling exhausted, degree/co-degree capped greedy used
};
SparseSlice sparse_slice(const BipartitePair& p, const Rational& eps, const Rational& d, const Rational& dprime,
                         Rng& rng);

enum class StabilityVerdict { Holds, Fails, PreconditionViolated, Vacuous };
std::string to_string(StabilityVerdict v);
struct StabilityReport {
    StabilityVerdict verdict = StabilityVerdict::Vacuous;
    std::string detail;
};
// `after` must be a sub-pair of `before` (vertex subsets, edge subset by global edge id).
StabilityReport stability_check_removal(const BipartitePair& before, const BipartitePair& after, const Rational& eps,
                                        const Rational& d, const Rational& dprime);

}  // namespace pcd

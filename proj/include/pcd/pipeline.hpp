#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcd/common.hpp"
#include "pcd/graph.hpp"
#include "pcd/regularity.hpp"
#include "pcd/tying.hpp"

namespace pcd {

// ---- weak quasirandomness

enum class QuasiMode { Auto, Exhaustive, Sampled };

struct QuasiWitness {
    std::vector<Vertex> A, B;
    std::int64_t crossing = 0;
    Rational required;  // p |A| |B|
};

struct QuasiResult {
    bool quasirandom = true;
    bool exhaustive = true;
    std::int64_t checked = 0;  // bipartitions examined
    std::optional<QuasiWitness> witness;  // the most violating bipartition found
};

constexpr int kQuasiExhaustiveCap = 20;

// Every bipartition with |A|, |B| >= eps n has e(A, B) >= p |A| |B|.
QuasiResult weak_quasirandom_test(const MultiGraph& g, const Rational& eps, const Rational& p,
                                  QuasiMode mode = QuasiMode::Auto, std::uint64_t seed = 1);

// ---- configuration

struct PipelineConfig {
    Rational eps = Rational(1, 100);
    Rational zeta = Rational(1, 4);
    Rational beta = Rational(1, 2);
    Rational delta = Rational(1, 10);
    Rational sparse_dcap = Rational(1, 4);  // Delta(H) <= dcap n for the sparse leftover
    int gamma_matchings = 6;                // Gamma per pair, as perfect matchings
    int gamma_prime_matchings = 1;          // Gamma' per pair
    int recert_root = 73;                   // Gamma~ re-certified at eps^(1/recert_root)
};

struct GammaSelection {
    std::vector<char> gamma, gamma_prime;
    Rational gamma_density;  // per pair, gamma_matchings / m
};

// Gamma and Gamma' as the first perfect matchings of every reduced pair; the pairs must be regular.
GammaSelection select_gamma(const MultiGraph& g, const ClusterPartition& part, const PipelineConfig& cfg);

struct PipelineInstance {
    MultiGraph g;
    ClusterPartition part;
    int pair_degree = 0;
};

// Cycle blow-up with pairs (d m)-regular plus v0 exceptional vertices sharing one neighbourhood;
// V0 is a path (v0 = 2) or a cycle (v0 >= 3) and every exceptional vertex has even degree.
PipelineInstance pipeline_instance(int k, int m, const Rational& d, int v0, int v0_degree, Rng& rng);

// ---- exceptional vertices

struct ExceptionalCover {
    std::vector<Walk> cycles;
    std::vector<EdgeId> leftover;        // edges of G[V0] left uncovered
    std::vector<EdgeId> extension_edges; // edges leaving V0 used to extend path ends
    std::vector<EdgeId> gamma_used;
    std::vector<char> gamma_residual;
    std::vector<LinkRecord> trace;
    TieBudget budget;
    int v0_paths = 0;
    int forests = 0;
};

// Covers G[V0]: paths of a greedy decomposition are extended out of V0 along `available` edges and
// tied through Gamma.
ExceptionalCover cover_exceptional(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>& gamma,
                                   const std::vector<char>& available, const PipelineConfig& cfg);

// ---- main step

enum class MainMode { Cycles, Paths };

struct FictiveEdgeSet {
    std::vector<std::pair<Vertex, Vertex>> edges;  // ids g.m(), g.m()+1, ... in the augmented graph
    std::vector<int> incidence;                    // per vertex
};

struct MainStepResult {
    std::vector<Walk> parts;           // cycles (cycle mode) or paths (path mode), on g's edge ids
    std::vector<EdgeId> leftover;      // uncovered Gamma' edges, at most floor(1/beta^2)
    std::vector<char> gamma_residual;  // Gamma~
    std::vector<LinkRecord> trace;
    TieBudget budget;
    int classes = 0;        // colour classes of the orientation cover
    int class_cycles = 0;   // cycles read off the classes directly
    int pieces = 0;         // tied pieces
    int sparse_cycles = 0;  // cycles covering Gamma'
    int reservoirs = 0;     // floor(1/zeta), at least 1
    int cycle_count = 0;
    Rational cycle_budget;  // Delta/2 + 7 zeta n
    bool within_budget = false;
    FictiveEdgeSet fictive;
    std::vector<int> endpoint_parity;  // path mode, per vertex
    bool parity_exact = true;
    Rational recert_eps;
    PartitionReport recert;
    int attempts = 0;
    std::vector<std::string> notes;
};

// Covers every `todo` edge and every Gamma' edge (up to the leftover) using Gamma for links.
// todo, gamma and gamma_prime must be disjoint; R(Gamma) must be connected.
MainStepResult main_step_cycles(const MultiGraph& g, const ClusterPartition& part, const std::vector<char>& todo,
                                const std::vector<char>& gamma, const std::vector<char>& gamma_prime, MainMode mode,
                                const std::vector<Vertex>& U, const PipelineConfig& cfg, Rng& rng);

// ---- top level

enum class Strategy { GreedyBasic, EulerianiseThenCycles, FullPipeline };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct BoundTarget {
    std::string name;
    std::string formula;
    Rational value;
    int achieved = 0;
    bool applies = true;
    bool pass = false;
};

struct BoundReport {
    int n = 0, m = 0, max_degree = 0, odd = 0;
    int paths = 0, cycles = 0, leftover = 0;
    Rational delta;
    std::vector<BoundTarget> targets;
    std::optional<int> oracle_min;         // paths and cycles
    std::optional<int> oracle_min_cycles;  // Eulerian inputs
    std::optional<int> oracle_min_paths;   // connected inputs
};

BoundReport bound_report(const MultiGraph& g, const Decomposition& d, const Rational& delta, bool consult_oracle = true);

struct DecomposeResult {
    Decomposition decomposition;
    BoundReport report;
    Strategy strategy = Strategy::GreedyBasic;
    bool verified = false;
    bool conservation = false;
    std::vector<std::string> notes;
};

// FullPipeline needs the partition of a generator-shaped instance.
DecomposeResult decompose(const MultiGraph& g, Strategy strategy, const Rational& delta, std::uint64_t seed,
                          const ClusterPartition* part = nullptr, const PipelineConfig& cfg = {});

// ---- counterexample audit

struct AuditEntry {
    std::string family;
    std::string measure;  // "cycles" or "paths"
    int n = 0, m = 0, max_degree = 0, odd = 0;
    std::string target_formula;
    Rational target;
    int oracle_min = 0;
    bool exceeds = false;
};

std::vector<AuditEntry> audit_counterexamples();

}  // namespace pcd

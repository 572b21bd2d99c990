#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dldd/clustering.hpp"
#include "dldd/distributions.hpp"
#include "dldd/graph.hpp"

namespace dldd {

/// Statistical thresholds shared by tests, the CLI and the acceptance suite.
namespace stats {
inline constexpr double kWilsonZ = 1.959963984540054;  // 95% two-sided
inline constexpr double kSigmas = 3.0;
inline constexpr double kIndependenceMaxZ = 3.0;
inline constexpr double kChiSquareAlpha = 0.001;
inline constexpr double kInequalityTol = 1e-9;
inline constexpr std::size_t kMinTrials = 100;
}  // namespace stats

enum class Algorithm { kBfhl, kL25 };

struct DecompositionRun {
  OrderedClustering clustering;
  MarkVector marks;  // all zero for kBfhl
};

DecompositionRun run_decomposition(const Digraph& graph, Algorithm algo, Length D, Length d,
                                   std::uint64_t seed);

// ---------------------------------------------------------------- exact checks

struct NamedCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct StructureReport {
  std::vector<NamedCheck> checks;
  Length max_weak_diameter = 0;    // exact when the weak_diameter check passes
  Length max_strong_diameter = 0;  // inside G[C_i]; kUnreachable if some C_i is not strongly connected
  bool ok() const;
  const NamedCheck* find(const std::string& name) const;
};

/// Named checks: disjoint, coverage, scc_pure, weak_diameter, backward_edges_in_cut_set.
StructureReport check_structure(const Digraph& graph, const OrderedClustering& clustering,
                                Length D);

struct SeparationReport {
  bool passed = true;
  std::optional<std::pair<VertexId, VertexId>> witness;  // (u in later cluster, v in earlier)
  Length witness_distance = 0;
};

/// For clustered u in C_i and v in C_j with i > j, requires dist_G(u, v) > d.
SeparationReport check_separation(const Digraph& graph, const OrderedClustering& clustering,
                                  std::span<const std::uint8_t> marks, Length d);

// ---------------------------------------------------------------- Monte Carlo

enum class ProbeKind { kEdge, kPath, kEdgeSubset, kVertexCluster };

struct ProbeSpec {
  ProbeKind kind = ProbeKind::kEdge;
  std::vector<EdgeId> edges;  // kEdge: one id; kPath / kEdgeSubset: several
  VertexId vertex = 0;        // kVertexCluster

  static ProbeSpec edge(EdgeId e) { return {ProbeKind::kEdge, {e}, 0}; }
  static ProbeSpec path(std::vector<EdgeId> es) { return {ProbeKind::kPath, std::move(es), 0}; }
  static ProbeSpec subset(std::vector<EdgeId> es) {
    return {ProbeKind::kEdgeSubset, std::move(es), 0};
  }
  static ProbeSpec vertex_cluster(VertexId v) { return {ProbeKind::kVertexCluster, {}, v}; }
};

/// d_Gamma for edge probes; 0 for vertex probes.
Length probe_length(const Digraph& graph, const ProbeSpec& probe);

/// Throws std::invalid_argument on ids out of range, empty edge lists, or a path whose
/// edges do not chain head to tail.
void validate_probe(const Digraph& graph, const ProbeSpec& probe);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double z = stats::kWilsonZ);

struct ProbeReport {
  std::string event;  // "cut" for edge probes, "clustered" for vertex probes
  std::size_t trials = 0;
  std::size_t event_count = 0;
  double point_estimate = 0.0;
  Interval wilson_95;
  double theory_exponent = 0.0;  // (d / D) * 640 * L * log2(m0)
  double theory_bound() const;   // exp(-theory_exponent)
};

/// Did this outcome realize the probe's event?
bool probe_event(const Digraph& graph, const DecompositionRun& run,
                 std::span<const std::uint32_t> assignment, const ProbeSpec& probe);

/// (d / D) * 640 * L * log2(m0) with L = ceil(log2 log2 max(m0, n0, 4)) + 1.
double theory_exponent(std::size_t m0, std::size_t n0, Length length, Length D);

/// Runs the decomposition with seeds base_seed, base_seed + 1, ... and evaluates every probe
/// on each outcome. Requires trials >= stats::kMinTrials. Results do not depend on `threads`.
std::vector<ProbeReport> estimate_events(const Digraph& graph, Algorithm algo, Length D, Length d,
                                         std::span<const ProbeSpec> probes, std::size_t trials,
                                         std::uint64_t base_seed, unsigned threads = 1);

ProbeReport estimate_event(const Digraph& graph, Algorithm algo, Length D, Length d,
                           const ProbeSpec& probe, std::size_t trials, std::uint64_t base_seed,
                           unsigned threads = 1);

struct IndependenceReport {
  ProbeReport unconditional_a;
  ProbeReport conditional_a_given_b;
  ProbeReport conditional_a_given_not_b;
  double z_score = 0.0;            // A|B against A|not B, pooled two-proportion statistic
  bool insufficient_conditioning = false;  // B never or always happened
  Length probe_distance = 0;       // undirected distance between the probes
};

/// Undirected distance between the endpoint sets of two edge probes.
Length undirected_probe_distance(const Digraph& graph, const ProbeSpec& a, const ProbeSpec& b);

/// Throws std::invalid_argument unless the probes are more than 2D apart (undirected).
IndependenceReport independence_test(const Digraph& graph, Algorithm algo, Length D, Length d,
                                     const ProbeSpec& a, const ProbeSpec& b, std::size_t trials,
                                     std::uint64_t seed);

double two_proportion_z(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2);

// ---------------------------------------------------------------- inequalities

/// k2/(k1+k2) + k3/(k1+k2+k3)  and  2 - 2 sqrt(k1/(k1+k2+k3)).
double adjacent_ratio_lhs(double k1, double k2, double k3);
double adjacent_ratio_rhs(double k1, double k2, double k3);

/// (1/r) sum_i k_i / (k_1 + ... + k_i)  and  1 - (1 - 1/r) k^(-1/(r-1)).
double prefix_ratio_lhs(std::span<const double> k);
double prefix_ratio_rhs(std::span<const double> k);

/// (1/r) sum_i (k_{i-d+1} + ... + k_i) / (k_1 + ... + k_i)  and
/// 1 - (1 - 1/floor(r/d)) k^(-1/(floor(r/d) - 1)).
double windowed_ratio_lhs(std::span<const double> k, int d);
double windowed_ratio_rhs(std::span<const double> k, int d);

/// Preconditions: all k_i >= 0 and k_1 >= 1 (and r > 1, or r >= 2d for the windowed form).
bool valid_prefix_instance(std::span<const double> k);
bool valid_windowed_instance(std::span<const double> k, int d);

struct InequalityResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t rejected = 0;     // generated instances failing the preconditions
  std::size_t violations = 0;
  double worst_excess = 0.0;    // max(lhs - rhs)
};

struct InequalityReport {
  std::vector<InequalityResult> inequalities;
  double equality_max_error = 0.0;  // equality case of the adjacent-ratio bound
  bool passed = true;
};

InequalityReport check_ratio_inequalities(std::size_t samples, RngStream& rng);

}  // namespace dldd

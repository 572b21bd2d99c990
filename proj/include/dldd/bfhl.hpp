#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dldd/clustering.hpp"
#include "dldd/distributions.hpp"
#include "dldd/estimator.hpp"
#include "dldd/graph.hpp"

namespace dldd {

/// Level schedule of the ball-carving decomposition. L, delta and the log factors come
/// from the original graph; `mass` is the vertex count of the current invocation.
struct BfhlSchedule {
  int L = 1;
  double delta = 1.0;
  std::vector<Length> r;         // r_0 .. r_L
  std::vector<std::uint64_t> s;  // s_0 .. s_L
  std::size_t m0 = 0;
  std::size_t n0 = 0;
  std::size_t mass = 0;
  Length D = 1;

  /// p_l = 2 ln(2 s_{l-1} / delta) / (r_l - r_{l-1}).
  double rate(int level) const;
  /// True when r_l == r_{l-1}; such levels are skipped.
  bool degenerate(int level) const { return r[level] == r[level - 1]; }
  /// An arc is long when 4 L d_e >= D; long arcs go straight into S.
  bool is_long(Length length) const;
  /// Rounds and per-round picks of the cutting procedure.
  std::size_t rounds() const;
  std::uint64_t picks_per_round(int level) const;
};

int ceil_log2(std::size_t x);

BfhlSchedule make_bfhl_schedule(std::size_t m0, std::size_t n0, Length D, std::size_t mass);

struct BfhlBallRecord {
  int depth = 0;
  int level = 0;
  Direction phase = Direction::kOut;
  VertexId center = 0;  // id in the input graph of decompose_bfhl
  Length radius = 0;
  Length lo = 0;  // r_{l-1}
  Length hi = 0;  // r_l
  std::size_t size = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t invocation = 0;
};

struct BfhlTrace {
  std::vector<BfhlBallRecord> balls;
  int max_depth = 0;
  std::size_t invocations = 0;
};

struct BfhlOptions {
  EstimatorKind estimator = EstimatorKind::kExact;
  /// Re-check order consistency against S inside every invocation (throws std::logic_error).
  bool check_invariants = false;
  BfhlTrace* trace = nullptr;
};

struct CuttingResult {
  std::vector<EdgeId> cut_edges;  // S, in the ids of the graph passed in
  std::vector<VertexId> remaining;  // R, sorted
  std::vector<std::vector<VertexId>> balls;  // carved, in carving order
  std::vector<Length> radii;
  std::vector<VertexId> centers;
  std::vector<std::uint64_t> streams;
};

/// One run of the cutting procedure at `level` on the alive part of `graph`.
/// With phase kIn the balls are in-balls (the procedure on the reversed graph) and the cut
/// edges are those entering a ball. `ball_counter` numbers the radius substreams.
CuttingResult cutting_procedure(const Digraph& graph, const BfhlSchedule& schedule, int level,
                                RngStream& rng, Direction phase = Direction::kOut,
                                std::span<const char> alive = {},
                                EstimatorKind estimator = EstimatorKind::kExact,
                                std::uint64_t* ball_counter = nullptr);

/// Largest accepted D for n vertices.
Length max_diameter_param(std::size_t n);

/// Throws std::invalid_argument for D <= 0 or D above max_diameter_param(n).
OrderedClustering decompose_bfhl(const Digraph& graph, Length D, std::uint64_t seed,
                                 const BfhlOptions& options = {});

}  // namespace dldd

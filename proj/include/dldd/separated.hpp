#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dldd/clustering.hpp"
#include "dldd/distributions.hpp"
#include "dldd/graph.hpp"

namespace dldd {

/// Radius schedule of the random-order ball cutting on a graph with m edges.
/// a_i = D/8 - sum_{j=1..i} D/16 * max(1/L, 2^-j), floored to integers.
struct SepSchedule {
  int L = 1;
  std::vector<Length> a;  // a_0 .. a_L
  Length D = 1;
  Length d = 0;
  double ln_mD = 0.0;     // ln(m0 * D), original m0
  bool degenerate = false;  // some range had to be widened to one integer

  /// Integer radius range (lo, hi] of iteration i (1-based), widened to width >= 1.
  std::pair<Length, Length> range(int i) const;
  /// min(2 max(deg, 1) / m * 2^(2^i) * ln(m0 D), 1)
  double sample_probability(std::size_t degree, std::size_t m, int i) const;
};

SepSchedule make_sep_schedule(std::size_t m, std::size_t m0, Length D, Length d);

struct HeavyLightLabels {
  std::vector<char> in_heavy;
  std::vector<char> out_heavy;
};

/// Heavy iff |E[B(v, floor(D/8))]| >= m/2 (exact count).
HeavyLightLabels label_heavy_light(const Digraph& graph, Length D);

enum class SepCase { kBase, kNoInHeavy, kNoOutHeavy, kHeavyPair, kHeavyDisjointOut, kHeavyDisjointIn };

/// Instrumentation of one run. Vertex ids are those of the input graph.
struct SepTrace {
  struct Invocation {
    std::uint64_t id = 0;
    int depth = 0;
    SepCase kind = SepCase::kBase;
    std::vector<VertexId> vertices;
  };
  struct Iteration {
    std::uint64_t invocation = 0;
    SepCase kind = SepCase::kBase;
    int i = 0;
    Direction sign = Direction::kIn;  // kIn for i(-), kOut for i(+)
  };
  /// One marking step: every scope vertex whose distance from the center set (measured in
  /// the invocation's graph, in `direction`) lies in (r - d, r + d] must end up marked.
  struct Annulus {
    std::uint64_t invocation = 0;
    std::vector<VertexId> centers;
    Direction direction = Direction::kOut;
    Length r = 0;
    Length d = 0;
    std::vector<VertexId> scope;
  };
  std::vector<Invocation> invocations;
  std::vector<Iteration> iterations;
  std::vector<Annulus> annuli;
  int max_depth = 0;
};

struct SepOptions {
  SepTrace* trace = nullptr;
};

struct SeparatedResult {
  OrderedClustering clustering;
  MarkVector marks;
  bool regime_warning = false;
};

/// Separation parameter above which the guarantees are not claimed: D / (8 max(1, log log n)).
double separation_regime_limit(std::size_t n, Length D);

/// Throws std::invalid_argument for D <= 0, d < 0 or D above the polynomial bound.
SeparatedResult decompose_separated(const Digraph& graph, Length D, Length d, std::uint64_t seed,
                                    const SepOptions& options = {});

}  // namespace dldd

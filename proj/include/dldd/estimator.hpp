#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dldd/graph.hpp"

namespace dldd {

enum class EstimatorKind { kExact, kSampled };

struct BallSizeEstimate {
  std::vector<std::size_t> size;  // b(v)
  Length radius = 0;
  Direction direction = Direction::kOut;
  /// Every b(v) lies in [(1 - f)|B(v,r)|, (1 + f)|B(v,r)|].
  double guarantee = 0.125;
};

/// Exact |B(v, r)|.
std::size_t ball_size_one(const Digraph& graph, VertexId v, Length r, Direction dir);

/// Ball sizes for every vertex. kExact runs one bounded search per vertex; kSampled uses
/// bottom-k rank sketches (exact whenever the ball has fewer than k vertices).
BallSizeEstimate ball_sizes_all(const Digraph& graph, Length r, Direction dir,
                                EstimatorKind kind = EstimatorKind::kExact,
                                std::uint64_t seed = 0);

/// Default sketch size for the sampled estimator on n vertices.
std::size_t default_sketch_size(std::size_t n);

/// Bottom-k estimate of |B(v, r)| for every vertex.
std::vector<std::size_t> sketch_ball_sizes(const Digraph& graph, Length r, Direction dir,
                                           std::size_t k, std::uint64_t seed,
                                           std::span<const char> alive = {});

/// min(|B(v, r)|, cap + 1) for each queried vertex, restricted to alive vertices.
/// Reuses the saturation radius of earlier queries: if u has more than `cap` vertices within
/// rho(u) and v reaches u at distance t with t + rho(u) <= r, v is saturated as well.
std::vector<std::size_t> ball_sizes_capped(const Digraph& graph, std::span<const VertexId> queries,
                                           Length r, Direction dir, std::size_t cap,
                                           std::span<const char> alive = {});

/// Edges of G[B(v, r)] for each vertex, capped at cap + 1, with the same saturation reuse.
std::vector<std::size_t> ball_edges_capped(const Digraph& graph, Length r, Direction dir,
                                           std::size_t cap);

}  // namespace dldd

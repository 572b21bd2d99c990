#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dldd/graph.hpp"

namespace dldd {

/// Ordered clustering (C_1, ..., C_k) with the cut-edge set S. Edge (u, v) is cut when
/// u's cluster comes strictly after v's.
struct OrderedClustering {
  std::vector<std::vector<VertexId>> clusters;
  std::vector<EdgeId> cut_edges;  // sorted, unique
  Length diameter = 0;            // D

  friend bool operator==(const OrderedClustering&, const OrderedClustering&) = default;
};

/// mk(v) == 1 means v is unclustered.
using MarkVector = std::vector<std::uint8_t>;

inline constexpr std::uint32_t kNoCluster = 0xffffffffu;

/// Cluster index of each vertex, kNoCluster if absent.
std::vector<std::uint32_t> cluster_assignment(const OrderedClustering& clustering,
                                              VertexId num_vertices);

/// SCCs of G minus the cut edges, in topological order (ties by minimum vertex id).
OrderedClustering clustering_from_cuts(const Digraph& graph, std::span<const EdgeId> cut_edges,
                                       Length diameter);

bool is_cut(std::span<const std::uint32_t> assignment, const Digraph& graph, EdgeId e);
bool is_cut(const OrderedClustering& clustering, const Digraph& graph, EdgeId e);

/// Edges going from a later cluster to an earlier one, sorted.
std::vector<EdgeId> backward_edges(const Digraph& graph, const OrderedClustering& clustering);

/// Splits every cluster into the SCCs of its induced subgraph minus the cut edges,
/// topologically ordered, in place of the original cluster. The cut set is left untouched.
OrderedClustering split_to_scc_and_reorder(const Digraph& graph,
                                           const OrderedClustering& clustering);

}  // namespace dldd

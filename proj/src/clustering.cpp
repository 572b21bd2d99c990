#include "dldd/clustering.hpp"

#include <algorithm>
#include <stdexcept>

namespace dldd {

std::vector<std::uint32_t> cluster_assignment(const OrderedClustering& clustering,
                                              VertexId num_vertices) {
  std::vector<std::uint32_t> at(num_vertices, kNoCluster);
  for (std::uint32_t i = 0; i < clustering.clusters.size(); ++i) {
    for (VertexId v : clustering.clusters[i]) {
      if (v >= num_vertices) throw std::invalid_argument("cluster vertex out of range");
      at[v] = i;
    }
  }
  return at;
}

OrderedClustering clustering_from_cuts(const Digraph& graph, std::span<const EdgeId> cut_edges,
                                       Length diameter) {
  std::vector<char> removed(graph.num_edges(), 0);
  for (EdgeId e : cut_edges) {
    if (e >= graph.num_edges()) throw std::invalid_argument("cut edge id out of range");
    removed[e] = 1;
  }
  OrderedClustering out;
  out.clusters = scc_condensation(graph, {}, removed);
  out.cut_edges.assign(cut_edges.begin(), cut_edges.end());
  std::sort(out.cut_edges.begin(), out.cut_edges.end());
  out.cut_edges.erase(std::unique(out.cut_edges.begin(), out.cut_edges.end()),
                      out.cut_edges.end());
  out.diameter = diameter;
  return out;
}

bool is_cut(std::span<const std::uint32_t> assignment, const Digraph& graph, EdgeId e) {
  const Edge& edge = graph.edge(e);
  const auto a = assignment[edge.tail], b = assignment[edge.head];
  return a != kNoCluster && b != kNoCluster && b < a;
}

bool is_cut(const OrderedClustering& clustering, const Digraph& graph, EdgeId e) {
  return is_cut(cluster_assignment(clustering, graph.num_vertices()), graph, e);
}

std::vector<EdgeId> backward_edges(const Digraph& graph, const OrderedClustering& clustering) {
  const auto at = cluster_assignment(clustering, graph.num_vertices());
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < graph.num_edges(); ++e)
    if (is_cut(at, graph, e)) out.push_back(e);
  return out;
}

OrderedClustering split_to_scc_and_reorder(const Digraph& graph,
                                           const OrderedClustering& clustering) {
  OrderedClustering out;
  out.cut_edges = clustering.cut_edges;
  out.diameter = clustering.diameter;
  std::vector<char> in_cut(graph.num_edges(), 0);
  for (EdgeId e : clustering.cut_edges) in_cut[e] = 1;
  SubgraphExtractor extractor(graph);
  for (const auto& cluster : clustering.clusters) {
    if (cluster.size() <= 1) {
      out.clusters.push_back(cluster);
      continue;
    }
    const Subgraph sub = extractor.extract(cluster);
    std::vector<char> removed(sub.graph.num_edges(), 0);
    for (EdgeId e = 0; e < sub.graph.num_edges(); ++e) removed[e] = in_cut[sub.to_parent_edge[e]];
    for (auto& piece : scc_condensation(sub.graph, {}, removed)) {
      for (auto& v : piece) v = sub.to_parent_vertex[v];
      std::sort(piece.begin(), piece.end());
      out.clusters.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace dldd

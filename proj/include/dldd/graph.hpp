#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace dldd {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using Length = std::int64_t;

/// Distance sentinel for "unreachable". Never produced by arithmetic on real lengths.
inline constexpr Length kUnreachable = std::numeric_limits<Length>::max();

enum class Direction { kOut, kIn };

constexpr Direction opposite(Direction dir) {
  return dir == Direction::kOut ? Direction::kIn : Direction::kOut;
}

struct Edge {
  VertexId tail = 0;
  VertexId head = 0;
  Length length = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Largest edge length accepted for a graph on n vertices: max(n, 16)^6, saturating.
Length max_edge_length(std::size_t n);

/// Simple directed graph with positive integer lengths. Immutable after construction;
/// edge ids are the positions in the edge list passed to the constructor.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(VertexId n) : Digraph(n, {}) {}
  /// Throws std::invalid_argument on self-loops, parallel arcs, out-of-range endpoints
  /// or lengths outside [1, max_edge_length(n)].
  Digraph(VertexId n, std::vector<Edge> edges);

  VertexId num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const EdgeId> out_edges(VertexId v) const {
    return {out_ids_.data() + out_offsets_[v], out_ids_.data() + out_offsets_[v + 1]};
  }
  std::span<const EdgeId> in_edges(VertexId v) const {
    return {in_ids_.data() + in_offsets_[v], in_ids_.data() + in_offsets_[v + 1]};
  }
  std::span<const EdgeId> incident(VertexId v, Direction dir) const {
    return dir == Direction::kOut ? out_edges(v) : in_edges(v);
  }
  /// Endpoint of `e` reached when traversing it in direction `dir`.
  VertexId far_end(EdgeId e, Direction dir) const {
    return dir == Direction::kOut ? edges_[e].head : edges_[e].tail;
  }

  /// Total number of incident arcs (in + out).
  std::size_t degree(VertexId v) const {
    return out_edges(v).size() + in_edges(v).size();
  }

  std::optional<EdgeId> find_edge(VertexId tail, VertexId head) const;

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  VertexId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EdgeId> out_ids_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<EdgeId> in_ids_;
};

/// Induced subgraph with the maps back to the parent's vertex and edge ids.
struct Subgraph {
  Digraph graph;
  std::vector<VertexId> to_parent_vertex;
  std::vector<EdgeId> to_parent_edge;
};

struct DistanceMap {
  std::vector<Length> dist;
  std::vector<VertexId> sources;
  Direction direction = Direction::kOut;

  bool reachable(VertexId v) const { return dist[v] != kUnreachable; }
};

/// Multi-source Dijkstra. With direction kIn the distances are *to* the source set.
/// With a bound, vertices farther than the bound are reported unreachable and never expanded.
/// Throws std::invalid_argument if `sources` is empty or the bound is negative.
DistanceMap shortest_paths(const Digraph& graph, std::span<const VertexId> sources,
                           Direction direction, std::optional<Length> bound = std::nullopt);

/// Sorted vertex set {x : dist(center, x) <= r} (out) or {y : dist(y, center) <= r} (in).
std::vector<VertexId> ball(const Digraph& graph, VertexId center, Length radius,
                           Direction direction);

/// Strongly connected components in a topological order of the condensation.
/// Components are sorted internally; incomparable components are ordered by their
/// minimum vertex id.
std::vector<std::vector<VertexId>> scc_condensation(const Digraph& graph);

/// Same, restricted to vertices with alive[v] != 0 and edges with removed[e] == 0.
/// Either span may be empty, meaning "all alive" / "none removed".
std::vector<std::vector<VertexId>> scc_condensation(const Digraph& graph,
                                                    std::span<const char> alive,
                                                    std::span<const char> removed_edges);

/// max over ordered pairs (u, v) of the subset of dist_G(u, v); kUnreachable if some pair
/// is disconnected. Requires a nonempty subset.
Length weak_diameter(const Digraph& graph, std::span<const VertexId> subset);

/// Vertices are renumbered in the order given by `subset` (which must not repeat).
/// Costs O(|V| + edges out of the subset); use SubgraphExtractor for many small subsets.
Subgraph induced_subgraph(const Digraph& graph, std::span<const VertexId> subset);

/// induced_subgraph with a scratch map kept between calls, so each extraction costs only
/// O(|subset| + edges out of the subset).
class SubgraphExtractor {
 public:
  explicit SubgraphExtractor(const Digraph& graph);
  Subgraph extract(std::span<const VertexId> subset);

 private:
  const Digraph* graph_;
  std::vector<VertexId> local_;
};

Digraph reverse(const Digraph& graph);

std::size_t edges_within(const Digraph& graph, std::span<const VertexId> subset);

/// Reusable bounded Dijkstra. Resetting costs O(touched), so repeated small searches on a
/// large graph stay proportional to the explored region.
class BoundedSearch {
 public:
  explicit BoundedSearch(const Digraph& graph)
      : graph_(&graph), dist_(graph.num_vertices(), kUnreachable),
        settled_flag_(graph.num_vertices(), 0), origin_(graph.num_vertices(), 0) {}

  /// Settles vertices in nondecreasing distance order, calling visit(v, dist) for each;
  /// the search stops early when visit returns false. Vertices with alive[v] == 0 are
  /// skipped entirely (an empty span means all alive).
  template <class Visitor>
  void run(std::span<const VertexId> sources, Direction dir, Length bound, Visitor&& visit,
           std::span<const char> alive = {});

  Length distance(VertexId v) const { return dist_[v]; }
  bool settled(VertexId v) const { return settled_flag_[v] != 0; }
  /// Source whose search wave first settled v.
  VertexId origin(VertexId v) const { return origin_[v]; }
  std::span<const VertexId> settled_vertices() const { return settled_; }

 private:
  void reset();

  const Digraph* graph_;
  std::vector<Length> dist_;
  std::vector<char> settled_flag_;
  std::vector<VertexId> origin_;
  std::vector<VertexId> touched_;
  std::vector<VertexId> settled_;
  using Entry = std::pair<Length, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

template <class Visitor>
void BoundedSearch::run(std::span<const VertexId> sources, Direction dir, Length bound,
                        Visitor&& visit, std::span<const char> alive) {
  reset();
  auto is_alive = [&](VertexId v) { return alive.empty() || alive[v] != 0; };
  for (VertexId s : sources) {
    if (!is_alive(s) || dist_[s] == 0) continue;
    if (dist_[s] == kUnreachable) touched_.push_back(s);
    dist_[s] = 0;
    origin_[s] = s;
    heap_.emplace(0, s);
  }
  while (!heap_.empty()) {
    auto [d, v] = heap_.top();
    heap_.pop();
    if (settled_flag_[v] || d != dist_[v]) continue;
    settled_flag_[v] = 1;
    settled_.push_back(v);
    if (!visit(v, d)) {
      while (!heap_.empty()) heap_.pop();
      return;
    }
    for (EdgeId e : graph_->incident(v, dir)) {
      VertexId w = graph_->far_end(e, dir);
      if (settled_flag_[w] || !is_alive(w)) continue;
      Length nd = d + graph_->edge(e).length;
      if (nd > bound || nd >= dist_[w]) continue;
      if (dist_[w] == kUnreachable) touched_.push_back(w);
      dist_[w] = nd;
      origin_[w] = origin_[v];
      heap_.emplace(nd, w);
    }
  }
}

}  // namespace dldd

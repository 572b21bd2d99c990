#include "dldd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "dldd/distributions.hpp"

namespace dldd {

std::size_t ball_size_one(const Digraph& graph, VertexId v, Length r, Direction dir) {
  if (r < 0) throw std::invalid_argument("ball_size_one: negative radius");
  BoundedSearch search(graph);
  std::size_t count = 0;
  const VertexId src[] = {v};
  search.run(src, dir, r, [&](VertexId, Length) {
    ++count;
    return true;
  });
  return count;
}

std::size_t default_sketch_size(std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(200.0 * (std::log(static_cast<double>(std::max<std::size_t>(n, 1))) + 1.0)));
}

BallSizeEstimate ball_sizes_all(const Digraph& graph, Length r, Direction dir,
                                EstimatorKind kind, std::uint64_t seed) {
  if (r < 0) throw std::invalid_argument("ball_sizes_all: negative radius");
  BallSizeEstimate out;
  out.radius = r;
  out.direction = dir;
  if (kind == EstimatorKind::kSampled) {
    out.size = sketch_ball_sizes(graph, r, dir, default_sketch_size(graph.num_vertices()), seed);
    return out;
  }
  out.size.resize(graph.num_vertices());
  BoundedSearch search(graph);
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    std::size_t count = 0;
    const VertexId src[] = {v};
    search.run(src, dir, r, [&](VertexId, Length) {
      ++count;
      return true;
    });
    out.size[v] = count;
  }
  return out;
}

std::vector<std::size_t> sketch_ball_sizes(const Digraph& graph, Length r, Direction dir,
                                           std::size_t k, std::uint64_t seed,
                                           std::span<const char> alive) {
  if (k < 2) throw std::invalid_argument("sketch_ball_sizes: k must be at least 2");
  const VertexId n = graph.num_vertices();
  auto is_alive = [&](VertexId v) { return alive.empty() || alive[v] != 0; };
  RngStream rng(seed, 0x736b65746368ULL);
  std::vector<double> rank(n);
  for (auto& x : rank) x = rng.uniform_open_closed();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return rank[a] < rank[b]; });

  // Pruned searches in rank order (min-rank sketch). sketch[v] holds (rank, dist) of the
  // sources that reached v, in increasing rank.
  std::vector<std::vector<std::pair<double, Length>>> sketch(n);
  std::vector<Length> dist(n, kUnreachable);
  std::vector<VertexId> touched;
  using Entry = std::pair<Length, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const Direction back = opposite(dir);
  for (VertexId w : order) {
    if (!is_alive(w)) continue;
    dist[w] = 0;
    touched.push_back(w);
    heap.emplace(0, w);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d != dist[v]) continue;
      std::size_t within = 0;
      for (const auto& [rk, dv] : sketch[v]) within += dv <= d;
      if (within >= k) continue;
      sketch[v].emplace_back(rank[w], d);
      for (EdgeId e : graph.incident(v, back)) {
        const VertexId x = graph.far_end(e, back);
        if (!is_alive(x)) continue;
        const Length nd = d + graph.edge(e).length;
        if (nd > r || nd >= dist[x]) continue;
        if (dist[x] == kUnreachable) touched.push_back(x);
        dist[x] = nd;
        heap.emplace(nd, x);
      }
    }
    for (VertexId x : touched) dist[x] = kUnreachable;
    touched.clear();
  }
  std::vector<std::size_t> est(n, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (!is_alive(v)) continue;
    if (sketch[v].size() < k) {
      est[v] = sketch[v].size();
    } else {
      const double kth = sketch[v][k - 1].first;
      est[v] = std::max<std::size_t>(
          k, static_cast<std::size_t>(std::llround(static_cast<double>(k - 1) / kth)));
    }
  }
  return est;
}

std::vector<std::size_t> ball_sizes_capped(const Digraph& graph, std::span<const VertexId> queries,
                                           Length r, Direction dir, std::size_t cap,
                                           std::span<const char> alive) {
  if (r < 0) throw std::invalid_argument("ball_sizes_capped: negative radius");
  std::vector<Length> rho(graph.num_vertices(), kUnreachable);
  std::vector<std::size_t> out(queries.size());
  BoundedSearch search(graph);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const VertexId v = queries[q];
    std::size_t count = 0;
    bool saturated = false;
    const VertexId src[] = {v};
    search.run(
        src, dir, r,
        [&](VertexId u, Length d) {
          ++count;
          if (count > cap) {
            rho[v] = d;
            saturated = true;
          } else if (rho[u] != kUnreachable && rho[u] <= r - d) {
            rho[v] = d + rho[u];
            saturated = true;
          }
          return !saturated;
        },
        alive);
    out[q] = saturated ? cap + 1 : count;
  }
  return out;
}

std::vector<std::size_t> ball_edges_capped(const Digraph& graph, Length r, Direction dir,
                                           std::size_t cap) {
  if (r < 0) throw std::invalid_argument("ball_edges_capped: negative radius");
  const VertexId n = graph.num_vertices();
  std::vector<Length> rho(n, kUnreachable);
  std::vector<std::size_t> out(n);
  BoundedSearch search(graph);
  for (VertexId v = 0; v < n; ++v) {
    std::size_t edges = 0;
    bool saturated = false;
    const VertexId src[] = {v};
    search.run(src, dir, r, [&](VertexId u, Length d) {
      for (EdgeId e : graph.out_edges(u)) edges += search.settled(graph.edge(e).head);
      for (EdgeId e : graph.in_edges(u)) edges += search.settled(graph.edge(e).tail);
      if (edges > cap) {
        rho[v] = d;
        saturated = true;
      } else if (rho[u] != kUnreachable && rho[u] <= r - d) {
        rho[v] = d + rho[u];
        saturated = true;
      }
      return !saturated;
    });
    if (saturated) {
      out[v] = cap + 1;
      continue;
    }
    // The visitor only counts edges between settled vertices; ties at the boundary are
    // all settled by the time the search drains, so this is exact.
    out[v] = edges;
  }
  return out;
}

}  // namespace dldd

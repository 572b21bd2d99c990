#include "dldd/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace dldd {

Length max_edge_length(std::size_t n) {
  const Length base = static_cast<Length>(std::max<std::size_t>(n, 16));
  constexpr Length kCap = Length{1} << 62;
  Length bound = 1;
  for (int i = 0; i < 6; ++i) {
    if (bound > kCap / base) return kCap;
    bound *= base;
  }
  return bound;
}

namespace {

void build_csr(VertexId n, std::span<const Edge> edges, bool by_tail,
               std::vector<std::size_t>& offsets, std::vector<EdgeId>& ids) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Edge& e : edges) ++offsets[(by_tail ? e.tail : e.head) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  ids.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (EdgeId i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    ids[cursor[by_tail ? e.tail : e.head]++] = i;
  }
}

std::uint64_t arc_key(VertexId u, VertexId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

Digraph::Digraph(VertexId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (edges_.size() >= std::numeric_limits<EdgeId>::max()) {
    throw std::invalid_argument("too many edges");
  }
  const Length max_len = max_edge_length(n_);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.tail >= n_ || e.head >= n_) {
      throw std::invalid_argument("edge " + std::to_string(i) + ": endpoint out of range");
    }
    if (e.tail == e.head) {
      throw std::invalid_argument("edge " + std::to_string(i) + ": self-loop");
    }
    if (e.length < 1 || e.length > max_len) {
      throw std::invalid_argument("edge " + std::to_string(i) + ": length " +
                                  std::to_string(e.length) + " outside [1, " +
                                  std::to_string(max_len) + "]");
    }
    if (!seen.insert(arc_key(e.tail, e.head)).second) {
      throw std::invalid_argument("edge " + std::to_string(i) + ": parallel arc");
    }
  }
  build_csr(n_, edges_, true, out_offsets_, out_ids_);
  build_csr(n_, edges_, false, in_offsets_, in_ids_);
}

std::optional<EdgeId> Digraph::find_edge(VertexId tail, VertexId head) const {
  if (tail >= n_ || head >= n_) return std::nullopt;
  const auto out = out_edges(tail);
  const auto in = in_edges(head);
  if (out.size() <= in.size()) {
    for (EdgeId e : out)
      if (edges_[e].head == head) return e;
  } else {
    for (EdgeId e : in)
      if (edges_[e].tail == tail) return e;
  }
  return std::nullopt;
}

void BoundedSearch::reset() {
  for (VertexId v : touched_) {
    dist_[v] = kUnreachable;
    settled_flag_[v] = 0;
  }
  touched_.clear();
  settled_.clear();
  while (!heap_.empty()) heap_.pop();
}

DistanceMap shortest_paths(const Digraph& graph, std::span<const VertexId> sources,
                           Direction direction, std::optional<Length> bound) {
  if (sources.empty()) throw std::invalid_argument("shortest_paths: empty source set");
  if (bound && *bound < 0) throw std::invalid_argument("shortest_paths: negative bound");
  for (VertexId s : sources) {
    if (s >= graph.num_vertices()) throw std::invalid_argument("shortest_paths: bad source");
  }
  DistanceMap out;
  out.dist.assign(graph.num_vertices(), kUnreachable);
  out.sources.assign(sources.begin(), sources.end());
  out.direction = direction;
  BoundedSearch search(graph);
  search.run(sources, direction, bound.value_or(kUnreachable - 1),
             [&](VertexId v, Length d) {
               out.dist[v] = d;
               return true;
             });
  return out;
}

std::vector<VertexId> ball(const Digraph& graph, VertexId center, Length radius,
                           Direction direction) {
  if (radius < 0) return {};
  BoundedSearch search(graph);
  std::vector<VertexId> result;
  const VertexId src[] = {center};
  search.run(src, direction, radius, [&](VertexId v, Length) {
    result.push_back(v);
    return true;
  });
  std::sort(result.begin(), result.end());
  return result;
}

namespace {

// Iterative Tarjan. Components come out in reverse topological order of the condensation.
std::vector<std::vector<VertexId>> tarjan(const Digraph& graph, std::span<const char> alive,
                                          std::span<const char> removed) {
  const VertexId n = graph.num_vertices();
  constexpr VertexId kNone = std::numeric_limits<VertexId>::max();
  std::vector<VertexId> index(n, kNone), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<VertexId> stack;
  std::vector<std::pair<VertexId, std::size_t>> call;  // vertex, next out-edge position
  std::vector<std::vector<VertexId>> comps;
  VertexId counter = 0;
  auto is_alive = [&](VertexId v) { return alive.empty() || alive[v] != 0; };
  auto usable = [&](EdgeId e) { return removed.empty() || removed[e] == 0; };

  for (VertexId root = 0; root < n; ++root) {
    if (!is_alive(root) || index[root] != kNone) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto out = graph.out_edges(v);
      bool descended = false;
      while (pos < out.size()) {
        const EdgeId e = out[pos++];
        if (!usable(e)) continue;
        const VertexId w = graph.edge(e).head;
        if (!is_alive(w)) continue;
        if (index[w] == kNone) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      const VertexId done = v;
      call.pop_back();
      if (!call.empty()) {
        const VertexId parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<VertexId> comp;
        VertexId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

}  // namespace

std::vector<std::vector<VertexId>> scc_condensation(const Digraph& graph,
                                                    std::span<const char> alive,
                                                    std::span<const char> removed_edges) {
  auto comps = tarjan(graph, alive, removed_edges);
  const std::size_t k = comps.size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp_of(graph.num_vertices(), kNone);
  for (std::uint32_t c = 0; c < k; ++c)
    for (VertexId v : comps[c]) comp_of[v] = c;

  // Kahn's algorithm on the condensation, smallest minimum-vertex first.
  std::vector<std::uint32_t> indegree(k, 0);
  std::vector<std::vector<std::uint32_t>> succ(k);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (!removed_edges.empty() && removed_edges[e]) continue;
    const Edge& edge = graph.edge(e);
    const auto a = comp_of[edge.tail], b = comp_of[edge.head];
    if (a == kNone || b == kNone || a == b) continue;
    succ[a].push_back(b);
    ++indegree[b];
  }
  using Key = std::pair<VertexId, std::uint32_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::uint32_t c = 0; c < k; ++c)
    if (indegree[c] == 0) ready.emplace(comps[c].front(), c);
  std::vector<std::vector<VertexId>> ordered;
  ordered.reserve(k);
  while (!ready.empty()) {
    const auto c = ready.top().second;
    ready.pop();
    for (auto d : succ[c])
      if (--indegree[d] == 0) ready.emplace(comps[d].front(), d);
    ordered.push_back(std::move(comps[c]));
  }
  return ordered;
}

std::vector<std::vector<VertexId>> scc_condensation(const Digraph& graph) {
  return scc_condensation(graph, {}, {});
}

Length weak_diameter(const Digraph& graph, std::span<const VertexId> subset) {
  if (subset.empty()) throw std::invalid_argument("weak_diameter: empty subset");
  std::vector<char> member(graph.num_vertices(), 0);
  std::size_t distinct = 0;
  for (VertexId v : subset) distinct += member[v] ? 0 : (member[v] = 1);
  BoundedSearch search(graph);
  Length diameter = 0;
  for (VertexId v : subset) {
    std::size_t found = 0;
    Length farthest = 0;
    const VertexId src[] = {v};
    search.run(src, Direction::kOut, kUnreachable - 1, [&](VertexId w, Length d) {
      if (member[w]) {
        farthest = d;
        ++found;
      }
      return found < distinct;
    });
    if (found < distinct) return kUnreachable;
    diameter = std::max(diameter, farthest);
  }
  return diameter;
}

Subgraph induced_subgraph(const Digraph& graph, std::span<const VertexId> subset) {
  return SubgraphExtractor(graph).extract(subset);
}

namespace {
constexpr VertexId kNoLocal = std::numeric_limits<VertexId>::max();
}

SubgraphExtractor::SubgraphExtractor(const Digraph& graph)
    : graph_(&graph), local_(graph.num_vertices(), kNoLocal) {}

Subgraph SubgraphExtractor::extract(std::span<const VertexId> subset) {
  const Digraph& graph = *graph_;
  // Clears local_ on every exit, including the throw below.
  struct Restore {
    std::vector<VertexId>& local;
    std::span<const VertexId> subset;
    VertexId filled = 0;
    ~Restore() {
      for (VertexId i = 0; i < filled; ++i) local[subset[i]] = kNoLocal;
    }
  } restore{local_, subset};
  for (VertexId i = 0; i < subset.size(); ++i) {
    const VertexId v = subset[i];
    if (v >= graph.num_vertices() || local_[v] != kNoLocal) {
      throw std::invalid_argument("induced_subgraph: subset repeats or is out of range");
    }
    local_[v] = i;
    restore.filled = i + 1;
  }
  Subgraph sub;
  sub.to_parent_vertex.assign(subset.begin(), subset.end());
  std::vector<Edge> edges;
  for (VertexId i = 0; i < subset.size(); ++i) {
    for (EdgeId e : graph.out_edges(subset[i])) {
      const Edge& edge = graph.edge(e);
      if (local_[edge.head] == kNoLocal) continue;
      edges.push_back({i, local_[edge.head], edge.length});
      sub.to_parent_edge.push_back(e);
    }
  }
  sub.graph = Digraph(static_cast<VertexId>(subset.size()), std::move(edges));
  return sub;
}

Digraph reverse(const Digraph& graph) {
  std::vector<Edge> edges;
  edges.reserve(graph.num_edges());
  for (const Edge& e : graph.edges()) edges.push_back({e.head, e.tail, e.length});
  return Digraph(graph.num_vertices(), std::move(edges));
}

std::size_t edges_within(const Digraph& graph, std::span<const VertexId> subset) {
  std::vector<char> member(graph.num_vertices(), 0);
  for (VertexId v : subset) member[v] = 1;
  std::size_t count = 0;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (!member[v]) continue;
    for (EdgeId e : graph.out_edges(v)) count += member[graph.edge(e).head];
  }
  return count;
}

}  // namespace dldd

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "../support/oracles.hpp"
#include "dldd/graph.hpp"
#include "dldd/io.hpp"

using namespace dldd;

namespace {

Digraph abc_path() { return Digraph(3, {{0, 1, 1}, {1, 2, 1}}); }

}  // namespace

TEST_CASE("digraph construction rejects non-simple input") {
  CHECK_THROWS_AS(Digraph(2, {{0, 0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, {{0, 1, 1}, {0, 1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, {{0, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, {{0, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, {{0, 1, max_edge_length(2) + 1}}), std::invalid_argument);
  CHECK_NOTHROW(Digraph(2, {{0, 1, 1}, {1, 0, 1}}));
}

TEST_CASE("adjacency lists agree in both directions") {
  std::mt19937_64 gen(5);
  const Digraph g = oracle::random_digraph(gen, 30, 0.2, 9);
  std::multiset<std::pair<VertexId, VertexId>> out_pairs, in_pairs;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    for (EdgeId e : g.out_edges(v)) {
      CHECK(g.edge(e).tail == v);
      out_pairs.insert({g.edge(e).tail, g.edge(e).head});
    }
    for (EdgeId e : g.in_edges(v)) {
      CHECK(g.edge(e).head == v);
      in_pairs.insert({g.edge(e).tail, g.edge(e).head});
    }
  }
  CHECK(out_pairs == in_pairs);
  CHECK(out_pairs.size() == g.num_edges());
}

TEST_CASE("shortest_paths examples") {
  const Digraph single(1);
  const VertexId zero = 0;
  CHECK(shortest_paths(single, std::span(&zero, 1), Direction::kOut).dist[0] == 0);

  const auto dm = shortest_paths(abc_path(), std::span(&zero, 1), Direction::kOut);
  CHECK(dm.dist == std::vector<Length>{0, 1, 2});

  const Digraph sc = star_cycle_graph(7);
  const auto ds = shortest_paths(sc, std::span(&zero, 1), Direction::kOut);
  for (Length d : ds.dist) CHECK(d <= 1);

  CHECK_THROWS_AS(shortest_paths(sc, {}, Direction::kOut), std::invalid_argument);
  CHECK_THROWS_AS(shortest_paths(sc, std::span(&zero, 1), Direction::kOut, Length{-1}),
                  std::invalid_argument);
}

TEST_CASE("shortest_paths matches Bellman-Ford on random graphs") {
  std::mt19937_64 gen(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    const VertexId n = 1 + static_cast<VertexId>(gen() % 20);
    const Digraph g = oracle::random_digraph(gen, n, 0.25, 12);
    std::vector<VertexId> sources;
    for (VertexId v = 0; v < n; ++v)
      if (gen() % 5 == 0) sources.push_back(v);
    if (sources.empty()) sources.push_back(static_cast<VertexId>(gen() % n));
    for (Direction dir : {Direction::kOut, Direction::kIn}) {
      const auto expect = oracle::bellman_ford(g, sources, dir == Direction::kIn);
      const auto got = shortest_paths(g, sources, dir);
      REQUIRE(got.dist == expect);
      // Bounded variant reports exactly the vertices within the bound.
      const Length bound = static_cast<Length>(gen() % 15);
      const auto bounded = shortest_paths(g, sources, dir, bound);
      for (VertexId v = 0; v < n; ++v) {
        if (expect[v] <= bound) CHECK(bounded.dist[v] == expect[v]);
        else CHECK(bounded.dist[v] == kUnreachable);
      }
      // Triangle inequality along every edge.
      for (const Edge& e : g.edges()) {
        const VertexId a = dir == Direction::kOut ? e.tail : e.head;
        const VertexId b = dir == Direction::kOut ? e.head : e.tail;
        if (got.dist[a] != kUnreachable) CHECK(got.dist[b] <= got.dist[a] + e.length);
      }
    }
  }
}

TEST_CASE("ball examples and reverse symmetry") {
  const Digraph g = abc_path();
  CHECK(ball(g, 0, 0, Direction::kOut) == std::vector<VertexId>{0});
  CHECK(ball(g, 0, 1, Direction::kOut) == std::vector<VertexId>{0, 1});
  CHECK(ball(g, 2, 1, Direction::kIn) == std::vector<VertexId>{1, 2});
  CHECK(ball(star_cycle_graph(5), 0, 1, Direction::kOut).size() == 5);

  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Digraph h = oracle::random_digraph(gen, 15, 0.2, 5);
    const Digraph hr = reverse(h);
    for (VertexId v = 0; v < h.num_vertices(); ++v) {
      const Length r = static_cast<Length>(gen() % 10);
      CHECK(ball(h, v, r, Direction::kOut) == ball(hr, v, r, Direction::kIn));
      const auto bf = oracle::bellman_ford(h, {v});
      std::vector<VertexId> expect;
      for (VertexId x = 0; x < h.num_vertices(); ++x)
        if (bf[x] <= r) expect.push_back(x);
      CHECK(ball(h, v, r, Direction::kOut) == expect);
    }
  }
}

TEST_CASE("scc_condensation examples") {
  const auto dag = scc_condensation(abc_path());
  CHECK(dag == std::vector<std::vector<VertexId>>{{0}, {1}, {2}});
  CHECK(scc_condensation(cycle_graph(3)).size() == 1);
  CHECK(scc_condensation(star_cycle_graph(9)).size() == 1);
  CHECK(scc_condensation(Digraph(0)).empty());
}

TEST_CASE("scc_condensation matches mutual reachability and is topologically ordered") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const VertexId n = 1 + static_cast<VertexId>(gen() % 18);
    const Digraph g = oracle::random_digraph(gen, n, 0.12, 3);
    const auto comps = scc_condensation(g);
    std::vector<std::size_t> where(n, SIZE_MAX);
    std::set<std::set<VertexId>> got;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      for (VertexId v : comps[i]) {
        REQUIRE(where[v] == SIZE_MAX);
        where[v] = i;
      }
      got.insert(std::set<VertexId>(comps[i].begin(), comps[i].end()));
    }
    for (VertexId v = 0; v < n; ++v) CHECK(where[v] != SIZE_MAX);
    const auto expect = oracle::scc_sets(g);
    CHECK(got == std::set<std::set<VertexId>>(expect.begin(), expect.end()));
    for (const Edge& e : g.edges()) CHECK(where[e.tail] <= where[e.head]);
  }
}

TEST_CASE("scc_condensation with alive mask and removed edges") {
  const Digraph g = cycle_graph(4);
  std::vector<char> alive{1, 1, 1, 1};
  std::vector<char> removed(g.num_edges(), 0);
  removed[*g.find_edge(3, 0)] = 1;
  const auto comps = scc_condensation(g, alive, removed);
  CHECK(comps == std::vector<std::vector<VertexId>>{{0}, {1}, {2}, {3}});
  alive[2] = 0;
  const auto comps2 = scc_condensation(g, alive, {});
  CHECK(comps2.size() == 3);
}

TEST_CASE("weak_diameter examples and Floyd oracle") {
  const Digraph c = cycle_graph(6);
  const std::vector<VertexId> all{0, 1, 2, 3, 4, 5};
  const VertexId one = 3;
  CHECK(weak_diameter(c, std::span(&one, 1)) == 0);
  CHECK(weak_diameter(c, all) == 5);
  const Digraph two(2);
  CHECK(weak_diameter(two, std::vector<VertexId>{0, 1}) == kUnreachable);

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Digraph g = oracle::random_digraph(gen, 12, 0.3, 7);
    const auto fw = oracle::floyd(g);
    std::vector<VertexId> subset;
    for (VertexId v = 0; v < 12; ++v)
      if (gen() % 2) subset.push_back(v);
    if (subset.empty()) subset.push_back(0);
    CHECK(weak_diameter(g, subset) == oracle::weak_diameter(fw, subset));
  }
}

TEST_CASE("weak_diameter never increases when edges are added") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 60; ++trial) {
    const Digraph g = oracle::random_digraph(gen, 10, 0.3, 4);
    auto edges = oracle::raw_edges(g);
    const VertexId u = static_cast<VertexId>(gen() % 10);
    const VertexId v = static_cast<VertexId>(gen() % 10);
    if (u == v || g.find_edge(u, v)) continue;
    edges.push_back({u, v, 1 + static_cast<Length>(gen() % 4)});
    const Digraph h(10, edges);
    const std::vector<VertexId> subset{0, 2, 4, 6, 8};
    CHECK(weak_diameter(h, subset) <= weak_diameter(g, subset));
  }
}

TEST_CASE("induced_subgraph, reverse, edges_within") {
  const Digraph g = abc_path();
  const auto sub = induced_subgraph(g, std::vector<VertexId>{0, 2});
  CHECK(sub.graph.num_vertices() == 2);
  CHECK(sub.graph.num_edges() == 0);
  CHECK(sub.to_parent_vertex == std::vector<VertexId>{0, 2});

  const auto empty = induced_subgraph(g, std::vector<VertexId>{});
  CHECK(empty.graph.num_vertices() == 0);

  const auto full = induced_subgraph(g, std::vector<VertexId>{0, 1, 2});
  CHECK(full.graph == g);
  CHECK_THROWS_AS(induced_subgraph(g, std::vector<VertexId>{0, 0}), std::invalid_argument);

  std::mt19937_64 gen(8);
  const Digraph h = oracle::random_digraph(gen, 20, 0.2, 9);
  CHECK(reverse(reverse(h)) == h);
  const Digraph hr = reverse(h);
  for (const Edge& e : h.edges()) {
    const auto r = hr.find_edge(e.head, e.tail);
    REQUIRE(r);
    CHECK(hr.edge(*r).length == e.length);
  }
  const auto sub2 = induced_subgraph(h, std::vector<VertexId>{3, 1, 4, 5, 9});
  for (const Edge& e : sub2.graph.edges()) {
    const auto pe = h.edge(sub2.to_parent_edge[&e - sub2.graph.edges().data()]);
    CHECK(pe.tail == sub2.to_parent_vertex[e.tail]);
    CHECK(pe.head == sub2.to_parent_vertex[e.head]);
    CHECK(pe.length == e.length);
  }

  CHECK(edges_within(g, std::vector<VertexId>{}) == 0);
  CHECK(edges_within(g, std::vector<VertexId>{0, 1, 2}) == 2);
  CHECK(edges_within(g, std::vector<VertexId>{0, 1}) == 1);
  CHECK(edges_within(h, std::vector<VertexId>{3, 1, 4, 5, 9}) == sub2.graph.num_edges());
}

TEST_CASE("SubgraphExtractor agrees with a brute-force filter across reuse") {
  std::mt19937_64 gen(44);
  const Digraph g = oracle::random_digraph(gen, 40, 0.15, 7);
  SubgraphExtractor ex(g);
  for (int t = 0; t < 300; ++t) {
    std::vector<VertexId> subset;
    for (VertexId v = 0; v < g.num_vertices(); ++v)
      if (gen() % 3 == 0) subset.push_back(v);
    std::shuffle(subset.begin(), subset.end(), gen);
    if (t % 7 == 3 && !subset.empty()) {
      // A repeated vertex throws and must leave the scratch map clean for the next call.
      auto bad = subset;
      bad.push_back(bad.front());
      CHECK_THROWS_AS(ex.extract(bad), std::invalid_argument);
    }
    const Subgraph sub = ex.extract(subset);
    // Oracle: keep every parent edge with both ends in the subset, renumbered by position.
    // Edge order follows the parent's adjacency, so compare as sets.
    std::set<std::tuple<VertexId, VertexId, Length>> expect, got;
    for (VertexId i = 0; i < subset.size(); ++i)
      for (VertexId j = 0; j < subset.size(); ++j)
        if (const auto e = g.find_edge(subset[i], subset[j])) expect.insert({i, j, g.edge(*e).length});
    for (const Edge& e : sub.graph.edges()) got.insert({e.tail, e.head, e.length});
    CHECK(sub.graph.num_vertices() == subset.size());
    CHECK(sub.graph.num_edges() == got.size());
    CHECK(got == expect);
    CHECK(sub.to_parent_vertex == subset);
    for (EdgeId e = 0; e < sub.graph.num_edges(); ++e) {
      const Edge& pe = g.edge(sub.to_parent_edge[e]);
      CHECK(pe.tail == subset[sub.graph.edge(e).tail]);
      CHECK(pe.head == subset[sub.graph.edge(e).head]);
    }
  }
}

TEST_CASE("BoundedSearch reuse and early stop") {
  const Digraph g = path_graph(10);
  BoundedSearch search(g);
  const VertexId s = 2;
  std::vector<VertexId> seen;
  search.run(std::span(&s, 1), Direction::kOut, 3, [&](VertexId v, Length) {
    seen.push_back(v);
    return true;
  });
  CHECK(seen == std::vector<VertexId>{2, 3, 4, 5});
  seen.clear();
  const VertexId t = 9;
  search.run(std::span(&t, 1), Direction::kIn, 100, [&](VertexId v, Length d) {
    seen.push_back(v);
    return d < 2;
  });
  CHECK(seen == std::vector<VertexId>{9, 8, 7});
  CHECK(!search.settled(2));
}

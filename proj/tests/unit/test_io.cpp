#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "../support/oracles.hpp"
#include "dldd/bfhl.hpp"
#include "dldd/io.hpp"
#include "dldd/separated.hpp"

using namespace dldd;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_dimacs_gr(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("expected a parse error for: " << text);
  return 0;
}

std::string error_text(const std::string& text) {
  try {
    parse_dimacs_gr(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("DIMACS examples") {
  const Digraph g = parse_dimacs_gr("p sp 2 1\na 1 2 5");
  CHECK(g.num_vertices() == 2);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.edge(0).tail == 0);
  CHECK(g.edge(0).head == 1);
  CHECK(g.edge(0).length == 5);

  const Digraph iso = parse_dimacs_gr("p sp 3 0\n");
  CHECK(iso.num_vertices() == 3);
  CHECK(iso.num_edges() == 0);

  CHECK(error_text("a 1 1 1").find("self-loop") != std::string::npos);

  const Digraph commented = parse_dimacs_gr("c hello\n\np sp 2 2\nc mid\na 1 2 1\r\na 2 1 3\n");
  CHECK(commented.num_edges() == 2);
}

TEST_CASE("DIMACS errors carry line numbers") {
  CHECK(error_line("c x\np sp two 1\n") == 2);
  CHECK(error_line("p sp 2 1\np sp 2 1\n") == 2);
  CHECK(error_line("a 1 2 1\np sp 2 1\n") == 1);
  CHECK(error_line("p sp 2 1\na 1 3 1\n") == 2);
  CHECK(error_line("p sp 2 1\na 0 1 1\n") == 2);
  CHECK(error_line("p sp 2 1\nc\na 1 2 0\n") == 3);
  CHECK(error_line("p sp 2 1\na 1 2 -4\n") == 2);
  CHECK(error_line("p sp 2 1\na 2 2 1\n") == 2);
  CHECK(error_line("p sp 2 1\na 1 2\n") == 2);
  CHECK(error_line("p sp 3 3\na 1 2 1\na 2 3 1\na 1 2 4\n") == 4);
  CHECK(error_line("p sp 2 1\nx 1 2\n") == 2);
  CHECK(error_text("p sp 2 1\na 1 2 1\n").empty());
  CHECK(error_text("p sp 2 2\na 1 2 1\n").find("declares 2 arcs") != std::string::npos);
  CHECK(error_text("c only\n").find("missing problem line") != std::string::npos);
  CHECK(error_text("p sp 2 1\na 1 2 100000000000\n").find("polynomial bound") != std::string::npos);
}

TEST_CASE("DIMACS round trip") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 50; ++t) {
    const Digraph g = oracle::random_digraph(gen, static_cast<VertexId>(gen() % 30), 0.2, 50);
    CHECK(parse_dimacs_gr(write_dimacs_gr(g, "round trip")) == g);
  }
  CHECK(parse_dimacs_gr(write_dimacs_gr(Digraph(0))) == Digraph(0));
}

TEST_CASE("generator examples") {
  const Digraph sc = star_cycle_graph(5);
  CHECK(sc.num_vertices() == 5);
  // The cycle already has v1 -> v2, so the extra arcs go to v3..v5: 5 + 3 arcs.
  CHECK(sc.num_edges() == 8);
  std::vector<VertexId> all{0, 1, 2, 3, 4};
  CHECK(weak_diameter(sc, all) == 4);
  CHECK(ball(sc, 0, 1, Direction::kOut).size() == 5);

  CHECK(path_graph(3).num_edges() == 2);
  CHECK(random_graph(0, 0.5, 1, 5, 1).num_vertices() == 0);
  CHECK(cycle_graph(5).num_edges() == 5);
  CHECK(bipath_graph(5).num_edges() == 8);
  CHECK(grid_graph(3).num_vertices() == 9);
  CHECK(grid_graph(3).num_edges() == 24);
  CHECK_THROWS_AS(cycle_graph(2), std::invalid_argument);
  CHECK_THROWS_AS(generate("nope", {}), std::invalid_argument);

  // star_cycle(n) is strongly connected with diameter n - 1.
  for (VertexId n : {3u, 9u, 33u}) {
    const Digraph g = star_cycle_graph(n);
    std::vector<VertexId> vs(n);
    for (VertexId i = 0; i < n; ++i) vs[i] = i;
    CHECK(scc_condensation(g).size() == 1);
    CHECK(weak_diameter(g, vs) == n - 1);
    CHECK(oracle::weak_diameter(oracle::floyd(g), vs) == n - 1);
  }
}

TEST_CASE("random_graph is seeded and respects its parameters") {
  const Digraph a = random_graph(60, 0.05, 2, 9, 17);
  CHECK(a == random_graph(60, 0.05, 2, 9, 17));
  CHECK(!(a == random_graph(60, 0.05, 2, 9, 18)));
  for (const Edge& e : a.edges()) {
    CHECK(e.length >= 2);
    CHECK(e.length <= 9);
  }
  CHECK(random_graph(20, 1.0, 1, 1, 3).num_edges() == 20 * 19);
  CHECK(random_graph(20, 0.0, 1, 1, 3).num_edges() == 0);
  // Arc count within 3 sigma of n (n - 1) p.
  const Digraph big = random_graph(300, 0.03, 1, 1, 4);
  const double mean = 300.0 * 299 * 0.03;
  CHECK(std::abs(double(big.num_edges()) - mean) <= 3 * std::sqrt(mean * 0.97));
  CHECK_THROWS_AS(random_graph(5, 1.5, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_graph(5, 0.5, 3, 2, 1), std::invalid_argument);
}

TEST_CASE("clustering JSON examples") {
  const Digraph empty(0);
  ClusteringDocument doc;
  doc.algorithm = "bfhl";
  doc.clustering.diameter = 4;
  const auto j = nlohmann::json::parse(write_clustering_json(empty, doc));
  CHECK(j["clusters"] == nlohmann::json::array());
  CHECK(j["cut_edges"] == nlohmann::json::array());
  CHECK(!j.contains("marks"));
  CHECK(j["D"] == 4);

  const Digraph g = cycle_graph(3);
  ClusteringDocument one;
  one.algorithm = "bfhl";
  one.clustering = decompose_bfhl(g, 32, 1);  // D = 8 would make every unit arc long
  REQUIRE(one.clustering.clusters.size() == 1);
  const auto j1 = nlohmann::json::parse(write_clustering_json(g, one));
  CHECK(j1["clusters"] == nlohmann::json::parse("[[0,1,2]]"));
}

TEST_CASE("clustering JSON round trip") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 30; ++t) {
    const Digraph g = oracle::random_digraph(gen, 5 + static_cast<VertexId>(gen() % 40), 0.1, 3);
    ClusteringDocument doc;
    doc.seed = gen();
    if (t % 2) {
      auto res = decompose_separated(g, 24, 2, doc.seed);
      doc.algorithm = "l25";
      doc.clustering = std::move(res.clustering);
      doc.marks = std::move(res.marks);
      doc.separation = 2;
    } else {
      doc.algorithm = "bfhl";
      doc.clustering = decompose_bfhl(g, 24, doc.seed);
    }
    const std::string text = write_clustering_json(g, doc);
    const ClusteringDocument back = read_clustering_json(g, text);
    CHECK(back.clustering == doc.clustering);
    CHECK(back.marks == doc.marks);
    CHECK(back.seed == doc.seed);
    CHECK(back.algorithm == doc.algorithm);
    CHECK(back.separation == doc.separation);
    CHECK(write_clustering_json(g, back) == text);
  }
}

TEST_CASE("clustering JSON reader rejects bad documents") {
  const Digraph g = path_graph(3);
  CHECK_THROWS_AS(read_clustering_json(g, "{"), ParseError);
  CHECK_THROWS_AS(read_clustering_json(g, R"({"clusters": []})"), ParseError);
  CHECK_THROWS_AS(read_clustering_json(g, R"({"D": 4, "clusters": [[0, 9]], "cut_edges": []})"),
                  ParseError);
  CHECK_THROWS_AS(read_clustering_json(g, R"({"D": 4, "clusters": [[0]], "cut_edges": [[2, 0]]})"),
                  ParseError);
  CHECK_THROWS_AS(read_clustering_json(g, R"({"D": 4, "clusters": [[0]], "cut_edges": [[0]]})"),
                  ParseError);
  CHECK_THROWS_AS(
      read_clustering_json(g, R"({"D": 4, "clusters": [[0]], "cut_edges": [], "marks": [0]})"),
      ParseError);
}

TEST_CASE("probe CSV") {
  ProbeReport r;
  r.event = "cut";
  r.trials = 100;
  r.event_count = 7;
  r.point_estimate = 0.07;
  r.wilson_95 = wilson_interval(7, 100);
  const std::string header = probe_csv_header();
  const std::string row = probe_csv_row("edge:1,2", r);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ',') - 1);
  CHECK(row.rfind("\"edge:1,2\",cut,100,7,", 0) == 0);
  CHECK(probe_csv_row("a\"b", r).rfind("\"a\"\"b\",", 0) == 0);
}

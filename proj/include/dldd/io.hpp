#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dldd/clustering.hpp"
#include "dldd/graph.hpp"
#include "dldd/verify.hpp"

namespace dldd {

/// Parse failure carrying the 1-based line number (0 when not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// DIMACS shortest-path format: "c" comments, one "p sp n m" header, "a u v w" arcs with
/// 1-based ids and positive weights.
Digraph parse_dimacs_gr(std::string_view text);
std::string write_dimacs_gr(const Digraph& graph, std::string_view comment = {});
Digraph read_dimacs_file(const std::string& path);

// Generators. All lengths are 1 except for random_graph.
Digraph path_graph(VertexId n);
Digraph cycle_graph(VertexId n);
/// Each undirected edge {i, i+1} as two arcs.
Digraph bipath_graph(VertexId n);
/// Bidirected k x k grid.
Digraph grid_graph(VertexId k);
/// Every ordered pair (u, v), u != v, is an arc with probability p; lengths uniform in
/// [min_length, max_length].
Digraph random_graph(VertexId n, double p, Length min_length, Length max_length,
                     std::uint64_t seed);
/// Directed cycle v_1 -> ... -> v_n -> v_1 plus arcs v_1 -> v_i for every other i.
Digraph star_cycle_graph(VertexId n);

struct GeneratorParams {
  VertexId n = 0;
  VertexId k = 0;  // grid side
  double p = 0.0;
  Length min_length = 1;
  Length max_length = 1;
  std::uint64_t seed = 0;
};

/// kind is one of path, cycle, bipath, grid, random, star_cycle.
Digraph generate(const std::string& kind, const GeneratorParams& params);

struct ClusteringDocument {
  OrderedClustering clustering;
  std::optional<MarkVector> marks;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::optional<Length> separation;  // d
};

/// {"D", "clusters", "cut_edges": [[u, v], ...], "marks"?, "seed", "algorithm", "d"?}
std::string write_clustering_json(const Digraph& graph, const ClusteringDocument& doc);
/// Cut edges are resolved against `graph`; throws ParseError on malformed input.
ClusteringDocument read_clustering_json(const Digraph& graph, std::string_view text);

std::string probe_csv_header();
std::string probe_csv_row(const std::string& label, const ProbeReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace dldd

#include "dldd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dldd/distributions.hpp"

namespace dldd {

namespace {

bool parse_u64(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  std::uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (v > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) return false;
    v = v * 10 + digit;
  }
  out = v;
  return true;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

Digraph parse_dimacs_gr(std::string_view text) {
  std::optional<std::pair<std::uint64_t, std::uint64_t>> header;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "c") {
      if (end == text.size()) break;
      continue;
    }
    if (toks[0] == "p") {
      if (header) throw ParseError(line_no, "duplicate problem line");
      std::uint64_t n = 0, m = 0;
      if (toks.size() != 4 || toks[1] != "sp" || !parse_u64(toks[2], n) || !parse_u64(toks[3], m)) {
        throw ParseError(line_no, "malformed header, expected 'p sp <n> <m>'");
      }
      if (n >= std::numeric_limits<VertexId>::max()) throw ParseError(line_no, "too many vertices");
      header.emplace(n, m);
      edges.reserve(std::min<std::uint64_t>(m, 1u << 26));
    } else if (toks[0] == "a") {
      // Errors visible on the line itself come before the missing-header error.
      std::uint64_t u = 0, v = 0, w = 0;
      if (toks.size() != 4 || !parse_u64(toks[1], u) || !parse_u64(toks[2], v)) {
        throw ParseError(line_no, "malformed arc, expected 'a <u> <v> <w>'");
      }
      if (!parse_u64(toks[3], w) || w < 1) throw ParseError(line_no, "weight must be a positive integer");
      if (u == v) throw ParseError(line_no, "self-loop");
      if (!header) throw ParseError(line_no, "arc before the problem line");
      const auto n = header->first;
      if (u < 1 || u > n || v < 1 || v > n) throw ParseError(line_no, "vertex id out of range");
      if (w > static_cast<std::uint64_t>(max_edge_length(n))) {
        throw ParseError(line_no, "weight exceeds the polynomial bound");
      }
      edges.push_back({static_cast<VertexId>(u - 1), static_cast<VertexId>(v - 1),
                       static_cast<Length>(w)});
      edge_line.push_back(line_no);
    } else {
      throw ParseError(line_no, "unknown line type '" + std::string(toks[0]) + "'");
    }
    if (end == text.size()) break;
  }
  if (!header) throw ParseError(0, "missing problem line");
  if (edges.size() != header->second) {
    throw ParseError(0, "header declares " + std::to_string(header->second) + " arcs, found " +
                            std::to_string(edges.size()));
  }
  // Duplicate detection with line numbers before the graph constructor sees them.
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (edges[a].tail != edges[b].tail) return edges[a].tail < edges[b].tail;
    if (edges[a].head != edges[b].head) return edges[a].head < edges[b].head;
    return a < b;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Edge& x = edges[order[i - 1]];
    const Edge& y = edges[order[i]];
    if (x.tail == y.tail && x.head == y.head) throw ParseError(edge_line[order[i]], "duplicate arc");
  }
  return Digraph(static_cast<VertexId>(header->first), std::move(edges));
}

std::string write_dimacs_gr(const Digraph& graph, std::string_view comment) {
  std::ostringstream os;
  if (!comment.empty()) os << "c " << comment << '\n';
  os << "p sp " << graph.num_vertices() << ' ' << graph.num_edges() << '\n';
  for (const Edge& e : graph.edges()) {
    os << "a " << e.tail + 1 << ' ' << e.head + 1 << ' ' << e.length << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Digraph read_dimacs_file(const std::string& path) { return parse_dimacs_gr(read_text_file(path)); }

Digraph path_graph(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1});
  return Digraph(n, std::move(edges));
}

Digraph cycle_graph(VertexId n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: need n >= 3 for a simple cycle");
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1});
  return Digraph(n, std::move(edges));
}

Digraph bipath_graph(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) {
    edges.push_back({i, i + 1, 1});
    edges.push_back({i + 1, i, 1});
  }
  return Digraph(n, std::move(edges));
}

Digraph grid_graph(VertexId k) {
  std::vector<Edge> edges;
  auto id = [k](VertexId r, VertexId c) { return r * k + c; };
  for (VertexId r = 0; r < k; ++r) {
    for (VertexId c = 0; c < k; ++c) {
      if (c + 1 < k) {
        edges.push_back({id(r, c), id(r, c + 1), 1});
        edges.push_back({id(r, c + 1), id(r, c), 1});
      }
      if (r + 1 < k) {
        edges.push_back({id(r, c), id(r + 1, c), 1});
        edges.push_back({id(r + 1, c), id(r, c), 1});
      }
    }
  }
  return Digraph(k * k, std::move(edges));
}

Digraph random_graph(VertexId n, double p, Length min_length, Length max_length,
                     std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("random_graph: p outside [0, 1]");
  if (min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("random_graph: bad length range");
  }
  RngStream rng(seed, 0x72616e646f6dULL);
  std::vector<Edge> edges;
  if (n < 2 || p == 0.0) return Digraph(n, std::move(edges));
  const std::uint64_t slots = static_cast<std::uint64_t>(n) * (n - 1);
  const double log_q = std::log1p(-p);
  std::uint64_t slot = 0;
  // Geometric skipping over the n (n - 1) ordered pairs.
  while (true) {
    if (p < 1.0) {
      const double skip = std::floor(std::log(rng.uniform_open_closed()) / log_q);
      if (skip >= static_cast<double>(slots - slot)) break;
      slot += static_cast<std::uint64_t>(skip);
    }
    if (slot >= slots) break;
    const auto u = static_cast<VertexId>(slot / (n - 1));
    auto v = static_cast<VertexId>(slot % (n - 1));
    if (v >= u) ++v;
    const Length len = min_length + static_cast<Length>(rng.uniform_below(
                                        static_cast<std::uint64_t>(max_length - min_length + 1)));
    edges.push_back({u, v, len});
    ++slot;
  }
  return Digraph(n, std::move(edges));
}

Digraph star_cycle_graph(VertexId n) {
  if (n < 3) throw std::invalid_argument("star_cycle_graph: need n >= 3");
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1});
  for (VertexId i = 2; i < n; ++i) edges.push_back({0, i, 1});
  return Digraph(n, std::move(edges));
}

Digraph generate(const std::string& kind, const GeneratorParams& params) {
  if (kind == "path") return path_graph(params.n);
  if (kind == "cycle") return cycle_graph(params.n);
  if (kind == "bipath") return bipath_graph(params.n);
  if (kind == "grid") return grid_graph(params.k ? params.k : params.n);
  if (kind == "random") {
    return random_graph(params.n, params.p, params.min_length, params.max_length, params.seed);
  }
  if (kind == "star_cycle") return star_cycle_graph(params.n);
  throw std::invalid_argument("unknown generator kind '" + kind + "'");
}

std::string write_clustering_json(const Digraph& graph, const ClusteringDocument& doc) {
  using nlohmann::json;
  json j;
  j["D"] = doc.clustering.diameter;
  j["algorithm"] = doc.algorithm;
  j["seed"] = doc.seed;
  if (doc.separation) j["d"] = *doc.separation;
  j["clusters"] = json::array();
  for (const auto& c : doc.clustering.clusters) j["clusters"].push_back(c);
  j["cut_edges"] = json::array();
  for (EdgeId e : doc.clustering.cut_edges) {
    j["cut_edges"].push_back({graph.edge(e).tail, graph.edge(e).head});
  }
  if (doc.marks) {
    json marks = json::array();
    for (auto m : *doc.marks) marks.push_back(static_cast<int>(m));
    j["marks"] = std::move(marks);
  }
  return j.dump() + "\n";
}

ClusteringDocument read_clustering_json(const Digraph& graph, std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  ClusteringDocument doc;
  try {
    doc.clustering.diameter = j.at("D").get<Length>();
    doc.algorithm = j.value("algorithm", std::string());
    doc.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("d")) doc.separation = j.at("d").get<Length>();
    for (const auto& c : j.at("clusters")) {
      std::vector<VertexId> cluster;
      for (const auto& v : c) {
        const auto id = v.get<std::int64_t>();
        if (id < 0 || id >= static_cast<std::int64_t>(graph.num_vertices())) {
          throw ParseError(0, "cluster vertex " + std::to_string(id) + " out of range");
        }
        cluster.push_back(static_cast<VertexId>(id));
      }
      doc.clustering.clusters.push_back(std::move(cluster));
    }
    for (const auto& pair : j.at("cut_edges")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError(0, "cut edge must be [u, v]");
      const auto u = pair[0].get<std::int64_t>();
      const auto v = pair[1].get<std::int64_t>();
      const auto n = static_cast<std::int64_t>(graph.num_vertices());
      std::optional<EdgeId> e;
      if (u >= 0 && v >= 0 && u < n && v < n) {
        e = graph.find_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
      }
      if (!e) {
        throw ParseError(0, "cut edge [" + std::to_string(u) + ", " + std::to_string(v) +
                                "] is not an arc of the graph");
      }
      doc.clustering.cut_edges.push_back(*e);
    }
    std::sort(doc.clustering.cut_edges.begin(), doc.clustering.cut_edges.end());
    doc.clustering.cut_edges.erase(
        std::unique(doc.clustering.cut_edges.begin(), doc.clustering.cut_edges.end()),
        doc.clustering.cut_edges.end());
    if (j.contains("marks")) {
      MarkVector marks;
      for (const auto& m : j.at("marks")) marks.push_back(m.get<int>() ? 1 : 0);
      if (marks.size() != graph.num_vertices()) throw ParseError(0, "marks length mismatch");
      doc.marks = std::move(marks);
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("bad clustering document: ") + e.what());
  }
  return doc;
}

std::string probe_csv_header() {
  return "probe,event,trials,event_count,point_estimate,wilson_lo,wilson_hi,theory_exponent,"
         "theory_bound\n";
}

std::string probe_csv_row(const std::string& label, const ProbeReport& r) {
  std::ostringstream os;
  // Labels are always quoted; embedded quotes are doubled.
  std::string quoted = "\"";
  for (char ch : label) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  os << std::setprecision(10) << quoted << ',' << r.event << ',' << r.trials << ','
     << r.event_count << ',' << r.point_estimate << ',' << r.wilson_95.lo << ','
     << r.wilson_95.hi << ',' << r.theory_exponent << ',' << r.theory_bound() << '\n';
  return os.str();
}

}  // namespace dldd

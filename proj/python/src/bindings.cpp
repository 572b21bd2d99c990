#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <tuple>
#include <vector>

#include "dldd/bfhl.hpp"
#include "dldd/distributions.hpp"
#include "dldd/io.hpp"
#include "dldd/separated.hpp"
#include "dldd/verify.hpp"

namespace py = pybind11;
using namespace dldd;

namespace {

Digraph make_graph(VertexId n, const std::vector<std::tuple<VertexId, VertexId, Length>>& arcs) {
  std::vector<Edge> edges;
  edges.reserve(arcs.size());
  for (const auto& [u, v, w] : arcs) edges.push_back({u, v, w});
  return Digraph(n, std::move(edges));
}

py::list cut_pairs(const Digraph& g, const OrderedClustering& c) {
  py::list out;
  for (EdgeId e : c.cut_edges) out.append(py::make_tuple(g.edge(e).tail, g.edge(e).head));
  return out;
}

EdgeId arc_id(const Digraph& g, VertexId u, VertexId v) {
  if (u >= g.num_vertices() || v >= g.num_vertices()) throw py::index_error("vertex out of range");
  const auto e = g.find_edge(u, v);
  if (!e) throw py::value_error("no such arc");
  return *e;
}

py::dict report_dict(const ProbeReport& r) {
  py::dict d;
  d["event"] = r.event;
  d["trials"] = r.trials;
  d["event_count"] = r.event_count;
  d["point_estimate"] = r.point_estimate;
  d["wilson_95"] = py::make_tuple(r.wilson_95.lo, r.wilson_95.hi);
  d["theory_exponent"] = r.theory_exponent;
  d["theory_bound"] = r.theory_bound();
  return d;
}

Algorithm algo_of(const std::string& s) {
  if (s == "bfhl") return Algorithm::kBfhl;
  if (s == "l25") return Algorithm::kL25;
  throw py::value_error("algorithm must be 'bfhl' or 'l25'");
}

Direction direction_of(const std::string& s) {
  if (s == "out") return Direction::kOut;
  if (s == "in") return Direction::kIn;
  throw py::value_error("direction must be 'out' or 'in'");
}

}  // namespace

PYBIND11_MODULE(_dldd, m) {
  m.doc() = "Directed low-diameter decompositions";
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Digraph>(m, "Digraph")
      .def(py::init(&make_graph), py::arg("n"), py::arg("arcs") = std::vector<std::tuple<VertexId, VertexId, Length>>{},
           "Simple digraph on n vertices from (tail, head, length) triples.")
      .def_property_readonly("num_vertices", &Digraph::num_vertices)
      .def_property_readonly("num_edges", &Digraph::num_edges)
      .def("arcs",
           [](const Digraph& g) {
             std::vector<std::tuple<VertexId, VertexId, Length>> out;
             for (const Edge& e : g.edges()) out.emplace_back(e.tail, e.head, e.length);
             return out;
           })
      .def("__eq__", [](const Digraph& a, const Digraph& b) { return a == b; })
      .def("__repr__", [](const Digraph& g) {
        return "<Digraph n=" + std::to_string(g.num_vertices()) +
               " m=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("parse_dimacs", [](const std::string& text) { return parse_dimacs_gr(text); });
  m.def("write_dimacs", [](const Digraph& g) { return write_dimacs_gr(g); });
  m.def(
      "generate",
      [](const std::string& kind, VertexId n, VertexId k, double p, Length min_length,
         Length max_length, std::uint64_t seed) {
        GeneratorParams params{n, k, p, min_length, max_length, seed};
        return generate(kind, params);
      },
      py::arg("kind"), py::arg("n") = 0, py::arg("k") = 0, py::arg("p") = 0.0,
      py::arg("min_length") = 1, py::arg("max_length") = 1, py::arg("seed") = 0);

  m.def(
      "distances",
      [](const Digraph& g, std::vector<VertexId> sources, const std::string& direction) {
        const DistanceMap dm = shortest_paths(
            g, sources, direction_of(direction));
        py::list out;
        for (Length d : dm.dist) {
          if (d == kUnreachable) out.append(py::none());
          else out.append(d);
        }
        return out;
      },
      py::arg("graph"), py::arg("sources"), py::arg("direction") = "out");
  m.def(
      "ball",
      [](const Digraph& g, VertexId center, Length r, const std::string& direction) {
        return ball(g, center, r, direction_of(direction));
      },
      py::arg("graph"), py::arg("center"), py::arg("radius"), py::arg("direction") = "out");
  m.def("sccs", [](const Digraph& g) { return scc_condensation(g); });
  m.def("weak_diameter", [](const Digraph& g, std::vector<VertexId> subset) -> py::object {
    const Length d = weak_diameter(g, subset);
    if (d == kUnreachable) return py::none();
    return py::int_(d);
  });

  m.def(
      "decompose",
      [](const Digraph& g, const std::string& algorithm, Length D, std::uint64_t seed, Length d,
         const std::string& estimator) {
        py::dict out;
        OrderedClustering c;
        if (algorithm == "bfhl") {
          BfhlOptions opt;
          opt.estimator = estimator == "sampled" ? EstimatorKind::kSampled : EstimatorKind::kExact;
          {
            py::gil_scoped_release release;
            c = decompose_bfhl(g, D, seed, opt);
          }
        } else if (algorithm == "l25") {
          SeparatedResult r;
          {
            py::gil_scoped_release release;
            r = decompose_separated(g, D, d, seed);
          }
          c = std::move(r.clustering);
          out["marks"] = std::vector<int>(r.marks.begin(), r.marks.end());
          out["regime_warning"] = r.regime_warning;
        } else {
          throw py::value_error("algorithm must be 'bfhl' or 'l25'");
        }
        out["clusters"] = c.clusters;
        out["cut_edges"] = cut_pairs(g, c);
        out["D"] = c.diameter;
        return out;
      },
      py::arg("graph"), py::arg("algorithm"), py::arg("D"), py::arg("seed"), py::arg("d") = 0,
      py::arg("estimator") = "exact",
      "Returns a dict with clusters (in order), cut_edges as (u, v) pairs, and marks for l25.");

  m.def(
      "check_structure",
      [](const Digraph& g, std::vector<std::vector<VertexId>> clusters,
         std::vector<std::pair<VertexId, VertexId>> cut_edges, Length D) {
        OrderedClustering c;
        c.diameter = D;
        c.clusters = std::move(clusters);
        for (auto [u, v] : cut_edges) c.cut_edges.push_back(arc_id(g, u, v));
        std::sort(c.cut_edges.begin(), c.cut_edges.end());
        c.cut_edges.erase(std::unique(c.cut_edges.begin(), c.cut_edges.end()), c.cut_edges.end());
        const StructureReport r = check_structure(g, c, D);
        py::dict out;
        for (const auto& chk : r.checks) out[py::str(chk.name)] = chk.passed;
        return out;
      },
      py::arg("graph"), py::arg("clusters"), py::arg("cut_edges"), py::arg("D"));

  m.def(
      "check_separation",
      [](const Digraph& g, std::vector<std::vector<VertexId>> clusters, std::vector<int> marks,
         Length d) -> py::object {
        OrderedClustering c;
        c.clusters = std::move(clusters);
        if (marks.size() != g.num_vertices()) throw py::value_error("marks length mismatch");
        MarkVector mk(marks.begin(), marks.end());
        const SeparationReport r = check_separation(g, c, mk, d);
        if (r.passed) return py::none();
        return py::make_tuple(r.witness->first, r.witness->second, r.witness_distance);
      },
      py::arg("graph"), py::arg("clusters"), py::arg("marks"), py::arg("d"),
      "None when separated, otherwise (u, v, dist) with u in a later cluster.");

  m.def(
      "estimate_edge_cut",
      [](const Digraph& g, const std::string& algorithm, Length D, VertexId u, VertexId v,
         std::size_t trials, std::uint64_t seed, Length d) {
        const ProbeSpec probe = ProbeSpec::edge(arc_id(g, u, v));
        ProbeReport r;
        {
          py::gil_scoped_release release;
          r = estimate_event(g, algo_of(algorithm), D, d, probe, trials, seed);
        }
        return report_dict(r);
      },
      py::arg("graph"), py::arg("algorithm"), py::arg("D"), py::arg("u"), py::arg("v"),
      py::arg("trials"), py::arg("seed"), py::arg("d") = 0);

  m.def(
      "independence_test",
      [](const Digraph& g, const std::string& algorithm, Length D, std::pair<VertexId, VertexId> a,
         std::pair<VertexId, VertexId> b, std::size_t trials, std::uint64_t seed, Length d) {
        const ProbeSpec pa = ProbeSpec::edge(arc_id(g, a.first, a.second));
        const ProbeSpec pb = ProbeSpec::edge(arc_id(g, b.first, b.second));
        IndependenceReport r;
        {
          py::gil_scoped_release release;
          r = independence_test(g, algo_of(algorithm), D, d, pa, pb, trials, seed);
        }
        py::dict out;
        out["unconditional_a"] = report_dict(r.unconditional_a);
        out["conditional_a_given_b"] = report_dict(r.conditional_a_given_b);
        out["conditional_a_given_not_b"] = report_dict(r.conditional_a_given_not_b);
        out["z_score"] = r.z_score;
        out["insufficient_conditioning"] = r.insufficient_conditioning;
        return out;
      },
      py::arg("graph"), py::arg("algorithm"), py::arg("D"), py::arg("a"), py::arg("b"),
      py::arg("trials"), py::arg("seed"), py::arg("d") = 0);

  m.def(
      "sample_trunc_exp",
      [](double rate, std::int64_t lo, std::int64_t hi, std::size_t count, std::uint64_t seed) {
        const TruncExpParams params{rate, lo, hi};
        validate(params);
        RngStream rng(seed, 0);
        std::vector<std::int64_t> out(count);
        for (auto& x : out) x = sample_trunc_exp(params, rng);
        return out;
      },
      py::arg("rate"), py::arg("lo"), py::arg("hi"), py::arg("count"), py::arg("seed"));
  m.def(
      "trunc_exp_pmf",
      [](double rate, std::int64_t lo, std::int64_t hi, std::int64_t x) {
        return trunc_exp_pmf(TruncExpParams{rate, lo, hi}, x);
      },
      py::arg("rate"), py::arg("lo"), py::arg("hi"), py::arg("x"));

  m.def(
      "check_inequalities",
      [](std::size_t samples, std::uint64_t seed) {
        RngStream rng(seed, 0);
        const InequalityReport r = check_ratio_inequalities(samples, rng);
        py::dict out;
        for (const auto& l : r.inequalities) out[py::str(l.name)] = l.violations;
        out["equality_max_error"] = r.equality_max_error;
        out["passed"] = r.passed;
        return out;
      },
      py::arg("samples"), py::arg("seed"));
}

#include "dldd/cli.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dldd/bfhl.hpp"
#include "dldd/io.hpp"
#include "dldd/separated.hpp"
#include "dldd/verify.hpp"

namespace dldd {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Raised for semantic usage problems found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "bfhl") return Algorithm::kBfhl;
  if (s == "l25") return Algorithm::kL25;
  throw UsageError("unknown algorithm '" + s + "' (expected bfhl or l25)");
}

std::vector<VertexId> parse_ids(const std::string& s) {
  std::vector<VertexId> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("bad vertex list '" + s + "'");
    }
    if (used != tok.size() || v > 0xfffffffeULL) throw UsageError("bad vertex list '" + s + "'");
    out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

EdgeId edge_between(const Digraph& g, VertexId u, VertexId v) {
  if (u >= g.num_vertices() || v >= g.num_vertices()) {
    throw UsageError("vertex out of range in probe " + std::to_string(u) + "," + std::to_string(v));
  }
  const auto e = g.find_edge(u, v);
  if (!e) throw UsageError("no arc " + std::to_string(u) + "->" + std::to_string(v));
  return *e;
}

ProbeSpec edge_probe(const Digraph& g, const std::string& s) {
  const auto ids = parse_ids(s);
  if (ids.size() != 2) throw UsageError("edge probe needs 'u,v', got '" + s + "'");
  return ProbeSpec::edge(edge_between(g, ids[0], ids[1]));
}

ProbeSpec path_probe(const Digraph& g, const std::string& s) {
  const auto ids = parse_ids(s);
  if (ids.size() < 2) throw UsageError("path probe needs at least two vertices");
  std::vector<EdgeId> es;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) es.push_back(edge_between(g, ids[i], ids[i + 1]));
  return ProbeSpec::path(std::move(es));
}

// "u,v;u,v;..."
ProbeSpec subset_probe(const Digraph& g, const std::string& s) {
  std::vector<EdgeId> es;
  std::stringstream ss(s);
  std::string pair;
  while (std::getline(ss, pair, ';')) es.push_back(edge_probe(g, pair).edges.front());
  if (es.empty()) throw UsageError("empty edge subset");
  return ProbeSpec::subset(std::move(es));
}

nlohmann::json report_json(const ProbeReport& r) {
  return {{"event", r.event},
          {"trials", r.trials},
          {"event_count", r.event_count},
          {"point_estimate", r.point_estimate},
          {"wilson_95", {r.wilson_95.lo, r.wilson_95.hi}},
          {"theory_exponent", r.theory_exponent},
          {"theory_bound", r.theory_bound()}};
}

struct Common {
  std::string input;
  std::string output;
  std::string algo = "bfhl";
  Length D = 0;
  Length d = 0;
  std::uint64_t seed = 0;
};

void add_graph_opts(CLI::App* cmd, Common& c) {
  cmd->add_option("-i,--input", c.input, "graph in DIMACS .gr format")->required();
}

void add_algo_opts(CLI::App* cmd, Common& c) {
  cmd->add_option("-a,--algo", c.algo, "bfhl or l25")->check(CLI::IsMember({"bfhl", "l25"}));
  cmd->add_option("-D,--diameter", c.D, "diameter bound D")->required()->check(CLI::PositiveNumber);
  cmd->add_option("-d,--separation", c.d, "separation d (l25 only)")->check(CLI::NonNegativeNumber);
  cmd->add_option("-s,--seed", c.seed, "random seed")->required();
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Directed low-diameter decompositions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // gen
  std::string gen_kind;
  GeneratorParams gen;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "write a generated graph as DIMACS");
  gen_cmd->add_option("--kind", gen_kind, "path, cycle, bipath, grid, random or star_cycle")
      ->required()
      ->check(CLI::IsMember({"path", "cycle", "bipath", "grid", "random", "star_cycle"}));
  gen_cmd->add_option("--n", gen.n, "number of vertices");
  gen_cmd->add_option("--k", gen.k, "grid side");
  gen_cmd->add_option("--p", gen.p, "arc probability (random)")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--min-length", gen.min_length, "minimum arc length (random)");
  gen_cmd->add_option("--max-length", gen.max_length, "maximum arc length (random)");
  gen_cmd->add_option("-s,--seed", gen_seed, "random seed (required for random)");
  gen_cmd->add_option("-o,--out", gen_out, "output path, stdout if omitted");

  // run
  Common run;
  std::string estimator = "exact";
  bool check_invariants = false;
  auto* run_cmd = app.add_subcommand("run", "decompose a graph and write the clustering as JSON");
  add_graph_opts(run_cmd, run);
  add_algo_opts(run_cmd, run);
  run_cmd->add_option("-o,--out", run.output, "output path, stdout if omitted");
  run_cmd->add_option("--estimator", estimator, "ball size estimator for bfhl")
      ->check(CLI::IsMember({"exact", "sampled"}));
  run_cmd->add_flag("--check-invariants", check_invariants, "assert order invariants while running");

  // verify
  Common ver;
  std::string clustering_path;
  std::optional<Length> ver_d;
  auto* ver_cmd = app.add_subcommand("verify", "structural and separation checks on a clustering");
  add_graph_opts(ver_cmd, ver);
  ver_cmd->add_option("-c,--clustering", clustering_path, "clustering JSON from run")->required();
  ver_cmd->add_option("-d,--separation", ver_d, "override d from the clustering file")
      ->check(CLI::NonNegativeNumber);
  ver_cmd->add_option("-o,--out", ver.output, "report path, stdout if omitted");

  // estimate
  Common est;
  std::size_t trials = 1000;
  unsigned threads = 0;
  std::vector<std::string> edge_probes, path_probes, subset_probes;
  std::vector<VertexId> vertex_probes;
  auto* est_cmd = app.add_subcommand("estimate", "Monte Carlo probe estimates as CSV");
  add_graph_opts(est_cmd, est);
  add_algo_opts(est_cmd, est);
  est_cmd->add_option("-t,--trials", trials, "number of independent runs");
  est_cmd->add_option("--threads", threads, "worker threads, 0 for hardware concurrency");
  est_cmd->add_option("--edge", edge_probes, "edge probe 'u,v' (0-based ids)");
  est_cmd->add_option("--path", path_probes, "path probe 'v0,v1,...,vk'");
  est_cmd->add_option("--subset", subset_probes, "edge subset probe 'u,v;u,v;...'");
  est_cmd->add_option("--vertex", vertex_probes, "vertex-clustered probe");
  est_cmd->add_option("-o,--out", est.output, "CSV path, stdout if omitted");

  // independence
  Common ind;
  std::size_t ind_trials = 10000;
  std::string probe_a, probe_b;
  auto* ind_cmd = app.add_subcommand("independence", "paired probe independence test");
  add_graph_opts(ind_cmd, ind);
  add_algo_opts(ind_cmd, ind);
  ind_cmd->add_option("-t,--trials", ind_trials, "number of independent runs");
  ind_cmd->add_option("--probe-a", probe_a, "edge probe A 'u,v'")->required();
  ind_cmd->add_option("--probe-b", probe_b, "edge probe B 'u,v'")->required();
  ind_cmd->add_option("-o,--out", ind.output, "report path, stdout if omitted");

  // inequalities
  std::size_t samples = 100000;
  std::uint64_t ineq_seed = 0;
  std::string ineq_out;
  auto* ineq_cmd = app.add_subcommand("inequalities", "numerical check of the ratio inequalities");
  ineq_cmd->add_option("--samples", samples, "instances per inequality");
  ineq_cmd->add_option("-s,--seed", ineq_seed, "random seed")->required();
  ineq_cmd->add_option("-o,--out", ineq_out, "report path, stdout if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) {
      if (gen_kind == "random") {
        if (!gen_seed) throw UsageError("gen --kind random requires --seed");
        gen.seed = *gen_seed;
      }
      const Digraph g = generate(gen_kind, gen);
      std::ostringstream comment;
      comment << gen_kind << " n=" << g.num_vertices();
      if (gen_kind == "random") comment << " p=" << gen.p << " seed=" << gen.seed;
      emit(gen_out, write_dimacs_gr(g, comment.str()));
      return kExitOk;
    }

    if (*run_cmd) {
      const Digraph g = read_dimacs_file(run.input);
      const Algorithm algo = parse_algorithm(run.algo);
      ClusteringDocument doc;
      doc.seed = run.seed;
      doc.algorithm = run.algo;
      if (algo == Algorithm::kBfhl) {
        BfhlOptions opt;
        opt.estimator = estimator == "sampled" ? EstimatorKind::kSampled : EstimatorKind::kExact;
        opt.check_invariants = check_invariants;
        doc.clustering = decompose_bfhl(g, run.D, run.seed, opt);
      } else {
        SeparatedResult res = decompose_separated(g, run.D, run.d, run.seed);
        if (res.regime_warning) {
          std::cerr << "warning: d exceeds D/(8 log log n); separation holds but few vertices "
                       "may be clustered\n";
        }
        doc.clustering = std::move(res.clustering);
        doc.marks = std::move(res.marks);
        doc.separation = run.d;
      }
      emit(run.output, write_clustering_json(g, doc));
      return kExitOk;
    }

    if (*ver_cmd) {
      const Digraph g = read_dimacs_file(ver.input);
      const ClusteringDocument doc = read_clustering_json(g, read_text_file(clustering_path));
      const StructureReport sr = check_structure(g, doc.clustering, doc.clustering.diameter);
      nlohmann::json out;
      out["D"] = doc.clustering.diameter;
      out["checks"] = nlohmann::json::array();
      for (const auto& c : sr.checks) {
        out["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      }
      out["max_weak_diameter"] = sr.max_weak_diameter;
      bool ok = sr.ok();
      const std::optional<Length> d = ver_d ? ver_d : doc.separation;
      if (d) {
        MarkVector marks = doc.marks ? *doc.marks : MarkVector(g.num_vertices(), 0);
        const SeparationReport sep = check_separation(g, doc.clustering, marks, *d);
        nlohmann::json sj{{"d", *d}, {"passed", sep.passed}};
        if (sep.witness) {
          sj["witness"] = {sep.witness->first, sep.witness->second};
          sj["witness_distance"] = sep.witness_distance;
        }
        out["separation"] = std::move(sj);
        ok = ok && sep.passed;
      }
      out["passed"] = ok;
      emit(ver.output, out.dump(2) + "\n");
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*est_cmd) {
      const Digraph g = read_dimacs_file(est.input);
      const Algorithm algo = parse_algorithm(est.algo);
      std::vector<ProbeSpec> probes;
      std::vector<std::string> labels;
      for (const auto& s : edge_probes) {
        probes.push_back(edge_probe(g, s));
        labels.push_back("edge:" + s);
      }
      for (const auto& s : path_probes) {
        probes.push_back(path_probe(g, s));
        labels.push_back("path:" + s);
      }
      for (const auto& s : subset_probes) {
        probes.push_back(subset_probe(g, s));
        labels.push_back("subset:" + s);
      }
      for (VertexId v : vertex_probes) {
        if (v >= g.num_vertices()) throw UsageError("vertex probe out of range");
        probes.push_back(ProbeSpec::vertex_cluster(v));
        labels.push_back("vertex:" + std::to_string(v));
      }
      if (probes.empty()) throw UsageError("estimate needs at least one probe");
      if (trials < stats::kMinTrials) {
        throw UsageError("--trials must be at least " + std::to_string(stats::kMinTrials));
      }
      const unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
      const auto reports = estimate_events(g, algo, est.D, est.d, probes, trials, est.seed, workers);
      std::string csv = probe_csv_header();
      for (std::size_t i = 0; i < reports.size(); ++i) {
        csv += probe_csv_row(labels[i], reports[i]);
      }
      emit(est.output, csv);
      return kExitOk;
    }

    if (*ind_cmd) {
      const Digraph g = read_dimacs_file(ind.input);
      const Algorithm algo = parse_algorithm(ind.algo);
      if (ind_trials < stats::kMinTrials) {
        throw UsageError("--trials must be at least " + std::to_string(stats::kMinTrials));
      }
      const IndependenceReport r = independence_test(g, algo, ind.D, ind.d, edge_probe(g, probe_a),
                                                     edge_probe(g, probe_b), ind_trials, ind.seed);
      const bool ok = r.insufficient_conditioning || std::abs(r.z_score) <= stats::kIndependenceMaxZ;
      nlohmann::json out{{"unconditional_a", report_json(r.unconditional_a)},
                         {"conditional_a_given_b", report_json(r.conditional_a_given_b)},
                         {"conditional_a_given_not_b", report_json(r.conditional_a_given_not_b)},
                         {"z_score", r.z_score},
                         {"insufficient_conditioning", r.insufficient_conditioning},
                         {"probe_distance", r.probe_distance},
                         {"passed", ok}};
      emit(ind.output, out.dump(2) + "\n");
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*ineq_cmd) {
      RngStream rng(ineq_seed, 0);
      const InequalityReport r = check_ratio_inequalities(samples, rng);
      nlohmann::json out;
      out["inequalities"] = nlohmann::json::array();
      for (const auto& l : r.inequalities) {
        out["inequalities"].push_back({{"name", l.name},
                                 {"instances", l.instances},
                                 {"rejected", l.rejected},
                                 {"violations", l.violations},
                                 {"worst_excess", l.worst_excess}});
      }
      out["equality_max_error"] = r.equality_max_error;
      out["passed"] = r.passed;
      emit(ineq_out, out.dump(2) + "\n");
      return r.passed ? kExitOk : kExitCheckFailed;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dldd

#include "dldd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>

#include "dldd/bfhl.hpp"
#include "dldd/separated.hpp"

namespace dldd {

DecompositionRun run_decomposition(const Digraph& graph, Algorithm algo, Length D, Length d,
                                   std::uint64_t seed) {
  DecompositionRun run;
  if (algo == Algorithm::kBfhl) {
    run.clustering = decompose_bfhl(graph, D, seed);
    run.marks.assign(graph.num_vertices(), 0);
  } else {
    SeparatedResult res = decompose_separated(graph, D, d, seed);
    run.clustering = std::move(res.clustering);
    run.marks = std::move(res.marks);
  }
  return run;
}

bool StructureReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.passed; });
}

const NamedCheck* StructureReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string vtx(VertexId v) { return std::to_string(v); }

}  // namespace

StructureReport check_structure(const Digraph& graph, const OrderedClustering& clustering,
                                Length D) {
  const VertexId n = graph.num_vertices();
  StructureReport report;
  NamedCheck disjoint{"disjoint", true, ""};
  NamedCheck coverage{"coverage", true, ""};
  NamedCheck scc_pure{"scc_pure", true, ""};
  NamedCheck diameter{"weak_diameter", true, ""};
  NamedCheck order{"backward_edges_in_cut_set", true, ""};

  std::vector<std::uint32_t> seen(n, 0);
  for (const auto& c : clustering.clusters) {
    for (VertexId v : c) {
      if (v >= n) {
        disjoint.passed = false;
        disjoint.detail = "vertex " + vtx(v) + " out of range";
        continue;
      }
      if (seen[v]++ == 1) {
        disjoint.passed = false;
        disjoint.detail = "vertex " + vtx(v) + " appears twice";
      }
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    if (seen[v] == 0) {
      coverage.passed = false;
      coverage.detail = "vertex " + vtx(v) + " in no cluster";
      break;
    }
  }
  if (!disjoint.passed || !coverage.passed) {
    report.checks = {disjoint, coverage, scc_pure, diameter, order};
    for (std::size_t i = 2; i < report.checks.size(); ++i) {
      report.checks[i].passed = false;
      report.checks[i].detail = "skipped: clusters are not a partition";
    }
    return report;
  }

  std::vector<char> in_cut(graph.num_edges(), 0);
  for (EdgeId e : clustering.cut_edges) {
    if (e < graph.num_edges()) in_cut[e] = 1;
  }
  const auto at = cluster_assignment(clustering, n);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (is_cut(at, graph, e) && !in_cut[e]) {
      order.passed = false;
      order.detail = "edge " + vtx(graph.edge(e).tail) + "->" + vtx(graph.edge(e).head) +
                     " goes backward but is not in S";
      break;
    }
  }

  std::vector<char> member(n, 0);
  BoundedSearch search(graph);
  SubgraphExtractor extractor(graph);
  for (std::size_t ci = 0; ci < clustering.clusters.size(); ++ci) {
    const auto& c = clustering.clusters[ci];
    if (c.size() <= 1) continue;
    const Subgraph sub = extractor.extract(c);
    std::vector<char> removed(sub.graph.num_edges(), 0);
    for (EdgeId e = 0; e < sub.graph.num_edges(); ++e) removed[e] = in_cut[sub.to_parent_edge[e]];
    if (scc_pure.passed && scc_condensation(sub.graph, {}, removed).size() != 1) {
      scc_pure.passed = false;
      scc_pure.detail = "cluster " + std::to_string(ci) + " is not strongly connected in G - S";
    }

    // Weak diameter, bounded by D.
    for (VertexId v : c) member[v] = 1;
    for (VertexId u : c) {
      std::size_t found = 0;
      Length farthest = 0;
      const VertexId src[] = {u};
      search.run(src, Direction::kOut, D, [&](VertexId x, Length dist) {
        if (member[x]) {
          ++found;
          farthest = dist;
        }
        return found < c.size();
      });
      if (found < c.size()) {
        if (diameter.passed) {
          diameter.passed = false;
          diameter.detail = "cluster " + std::to_string(ci) + " has weak diameter > " +
                            std::to_string(D) + " (from vertex " + vtx(u) + ")";
        }
        report.max_weak_diameter = std::max(report.max_weak_diameter, weak_diameter(graph, c));
        break;
      }
      report.max_weak_diameter = std::max(report.max_weak_diameter, farthest);
    }
    for (VertexId v : c) member[v] = 0;

    // Strong diameter inside G[C].
    if (report.max_strong_diameter != kUnreachable) {
      std::vector<VertexId> all(c.size());
      for (VertexId i = 0; i < c.size(); ++i) all[i] = i;
      report.max_strong_diameter =
          std::max(report.max_strong_diameter, weak_diameter(sub.graph, all));
    }
  }
  report.checks = {disjoint, coverage, scc_pure, diameter, order};
  return report;
}

SeparationReport check_separation(const Digraph& graph, const OrderedClustering& clustering,
                                  std::span<const std::uint8_t> marks, Length d) {
  const VertexId n = graph.num_vertices();
  if (marks.size() != n) throw std::invalid_argument("check_separation: marks size mismatch");
  const auto at = cluster_assignment(clustering, n);
  SeparationReport report;
  BoundedSearch search(graph);
  for (std::uint32_t j = 0; j < clustering.clusters.size(); ++j) {
    std::vector<VertexId> targets;
    for (VertexId v : clustering.clusters[j])
      if (!marks[v]) targets.push_back(v);
    if (targets.empty()) continue;
    // Everything that reaches C_j within distance d.
    search.run(targets, Direction::kIn, d, [&](VertexId u, Length dist) {
      if (!marks[u] && at[u] != kNoCluster && at[u] > j) {
        report.passed = false;
        report.witness = std::make_pair(u, search.origin(u));
        report.witness_distance = dist;
        return false;
      }
      return true;
    });
    if (!report.passed) break;
  }
  return report;
}

Length probe_length(const Digraph& graph, const ProbeSpec& probe) {
  Length total = 0;
  for (EdgeId e : probe.edges) total += graph.edge(e).length;
  return total;
}

void validate_probe(const Digraph& graph, const ProbeSpec& probe) {
  if (probe.kind == ProbeKind::kVertexCluster) {
    if (probe.vertex >= graph.num_vertices()) throw std::invalid_argument("probe: bad vertex");
    return;
  }
  if (probe.edges.empty()) throw std::invalid_argument("probe: no edges");
  if (probe.kind == ProbeKind::kEdge && probe.edges.size() != 1) {
    throw std::invalid_argument("probe: edge probe needs exactly one edge");
  }
  for (EdgeId e : probe.edges)
    if (e >= graph.num_edges()) throw std::invalid_argument("probe: bad edge id");
  if (probe.kind == ProbeKind::kPath) {
    for (std::size_t i = 1; i < probe.edges.size(); ++i) {
      if (graph.edge(probe.edges[i - 1]).head != graph.edge(probe.edges[i]).tail) {
        throw std::invalid_argument("probe: path edges do not chain");
      }
    }
  }
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

double ProbeReport::theory_bound() const { return std::exp(-theory_exponent); }

double theory_exponent(std::size_t m0, std::size_t n0, Length length, Length D) {
  const BfhlSchedule s = make_bfhl_schedule(m0, n0, D, std::max<std::size_t>(n0, 1));
  const double lg = std::log2(static_cast<double>(std::max<std::size_t>(m0, 2)));
  return static_cast<double>(length) / static_cast<double>(D) * 640.0 * s.L * lg;
}

bool probe_event(const Digraph& graph, const DecompositionRun& run,
                 std::span<const std::uint32_t> assignment, const ProbeSpec& probe) {
  if (probe.kind == ProbeKind::kVertexCluster) return run.marks[probe.vertex] == 0;
  for (EdgeId e : probe.edges)
    if (is_cut(assignment, graph, e)) return true;
  return false;
}

namespace {

ProbeReport make_report(const Digraph& graph, const ProbeSpec& probe, Length D, Length d,
                        std::size_t trials, std::size_t events) {
  ProbeReport r;
  r.event = probe.kind == ProbeKind::kVertexCluster ? "clustered" : "cut";
  r.trials = trials;
  r.event_count = events;
  r.point_estimate = trials ? static_cast<double>(events) / static_cast<double>(trials) : 0.0;
  r.wilson_95 = wilson_interval(events, trials);
  const Length len = probe.kind == ProbeKind::kVertexCluster ? d : probe_length(graph, probe);
  r.theory_exponent = theory_exponent(graph.num_edges(), graph.num_vertices(), len, D);
  return r;
}

}  // namespace

std::vector<ProbeReport> estimate_events(const Digraph& graph, Algorithm algo, Length D, Length d,
                                         std::span<const ProbeSpec> probes, std::size_t trials,
                                         std::uint64_t base_seed, unsigned threads) {
  if (trials < stats::kMinTrials) {
    throw std::invalid_argument("estimate: need at least " + std::to_string(stats::kMinTrials) +
                                " trials");
  }
  for (const auto& p : probes) validate_probe(graph, p);
  // Per-trial seeds are fixed, so any split of trials over workers gives the same counts.
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, trials));
  std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(probes.size(), 0));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t t = w; t < trials; t += workers) {
        const DecompositionRun run = run_decomposition(graph, algo, D, d, base_seed + t);
        const auto at = cluster_assignment(run.clustering, graph.num_vertices());
        for (std::size_t i = 0; i < probes.size(); ++i)
          partial[w][i] += probe_event(graph, run, at, probes[i]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<std::size_t> counts(probes.size(), 0);
  for (const auto& part : partial)
    for (std::size_t i = 0; i < probes.size(); ++i) counts[i] += part[i];
  std::vector<ProbeReport> out;
  for (std::size_t i = 0; i < probes.size(); ++i)
    out.push_back(make_report(graph, probes[i], D, d, trials, counts[i]));
  return out;
}

ProbeReport estimate_event(const Digraph& graph, Algorithm algo, Length D, Length d,
                           const ProbeSpec& probe, std::size_t trials, std::uint64_t base_seed,
                           unsigned threads) {
  return estimate_events(graph, algo, D, d, std::span<const ProbeSpec>(&probe, 1), trials,
                         base_seed, threads)
      .front();
}

Length undirected_probe_distance(const Digraph& graph, const ProbeSpec& a, const ProbeSpec& b) {
  auto endpoints = [&](const ProbeSpec& p) {
    std::vector<VertexId> pts;
    if (p.kind == ProbeKind::kVertexCluster) {
      pts.push_back(p.vertex);
    } else {
      for (EdgeId e : p.edges) {
        pts.push_back(graph.edge(e).tail);
        pts.push_back(graph.edge(e).head);
      }
    }
    return pts;
  };
  const auto src = endpoints(a);
  const auto dst = endpoints(b);
  std::vector<char> target(graph.num_vertices(), 0);
  for (VertexId v : dst) target[v] = 1;
  std::vector<Length> dist(graph.num_vertices(), kUnreachable);
  using Entry = std::pair<Length, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (VertexId v : src) {
    dist[v] = 0;
    heap.emplace(0, v);
  }
  while (!heap.empty()) {
    auto [dv, v] = heap.top();
    heap.pop();
    if (dv != dist[v]) continue;
    if (target[v]) return dv;
    for (Direction dir : {Direction::kOut, Direction::kIn}) {
      for (EdgeId e : graph.incident(v, dir)) {
        const VertexId w = graph.far_end(e, dir);
        const Length nd = dv + graph.edge(e).length;
        if (nd < dist[w]) {
          dist[w] = nd;
          heap.emplace(nd, w);
        }
      }
    }
  }
  return kUnreachable;
}

double two_proportion_z(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) return 0.0;
  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

IndependenceReport independence_test(const Digraph& graph, Algorithm algo, Length D, Length d,
                                     const ProbeSpec& a, const ProbeSpec& b, std::size_t trials,
                                     std::uint64_t seed) {
  validate_probe(graph, a);
  validate_probe(graph, b);
  if (trials < stats::kMinTrials) throw std::invalid_argument("independence: too few trials");
  IndependenceReport report;
  report.probe_distance = undirected_probe_distance(graph, a, b);
  if (report.probe_distance != kUnreachable && report.probe_distance <= 2 * D) {
    throw std::invalid_argument("independence: probes are within undirected distance 2D (" +
                                std::to_string(report.probe_distance) + ")");
  }
  std::size_t a_count = 0, b_count = 0, a_and_b = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const DecompositionRun run = run_decomposition(graph, algo, D, d, seed + t);
    const auto at = cluster_assignment(run.clustering, graph.num_vertices());
    const bool ea = probe_event(graph, run, at, a);
    const bool eb = probe_event(graph, run, at, b);
    a_count += ea;
    b_count += eb;
    a_and_b += ea && eb;
  }
  report.unconditional_a = make_report(graph, a, D, d, trials, a_count);
  report.conditional_a_given_b = make_report(graph, a, D, d, b_count, a_and_b);
  report.conditional_a_given_not_b =
      make_report(graph, a, D, d, trials - b_count, a_count - a_and_b);
  report.insufficient_conditioning = b_count == 0 || b_count == trials;
  if (!report.insufficient_conditioning) {
    report.z_score = two_proportion_z(a_and_b, b_count, a_count - a_and_b, trials - b_count);
  }
  return report;
}

double adjacent_ratio_lhs(double k1, double k2, double k3) {
  return k2 / (k1 + k2) + k3 / (k1 + k2 + k3);
}

double adjacent_ratio_rhs(double k1, double k2, double k3) {
  return 2.0 - 2.0 * std::sqrt(k1 / (k1 + k2 + k3));
}

bool valid_prefix_instance(std::span<const double> k) {
  if (k.size() < 2 || k[0] < 1.0) return false;
  return std::all_of(k.begin(), k.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
}

bool valid_windowed_instance(std::span<const double> k, int d) {
  if (d < 1 || k.size() < 2 * static_cast<std::size_t>(d)) return false;
  if (k.empty() || k[0] < 1.0) return false;
  return std::all_of(k.begin(), k.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
}

double prefix_ratio_lhs(std::span<const double> k) {
  return windowed_ratio_lhs(k, 1);
}

double prefix_ratio_rhs(std::span<const double> k) {
  const double r = static_cast<double>(k.size());
  double total = 0.0;
  for (double x : k) total += x;
  return 1.0 - (1.0 - 1.0 / r) * std::pow(total, -1.0 / (r - 1.0));
}

double windowed_ratio_lhs(std::span<const double> k, int d) {
  const std::size_t r = k.size();
  double prefix = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    prefix += k[i];
    double window = 0.0;
    const std::size_t start = i + 1 >= static_cast<std::size_t>(d) ? i + 1 - d : 0;
    for (std::size_t j = start; j <= i; ++j) window += k[j];
    sum += prefix > 0.0 ? window / prefix : 0.0;
  }
  return sum / static_cast<double>(r);
}

double windowed_ratio_rhs(std::span<const double> k, int d) {
  const double q = std::floor(static_cast<double>(k.size()) / d);
  double total = 0.0;
  for (double x : k) total += x;
  return 1.0 - (1.0 - 1.0 / q) * std::pow(total, -1.0 / (q - 1.0));
}

namespace {

double log_uniform(RngStream& rng, double lo, double hi) {
  const double u = rng.uniform_closed_open();
  return lo * std::pow(hi / lo, u);
}

std::vector<double> random_sequence(RngStream& rng, std::size_t r) {
  std::vector<double> k(r);
  // Mix of zeros, small and large weights; the first entry is drawn around the k_1 >= 1
  // boundary so the generator's precondition filter is exercised.
  for (auto& x : k) {
    const double u = rng.uniform_closed_open();
    x = u < 0.2 ? 0.0 : log_uniform(rng, 1e-3, 1e4);
  }
  k[0] = log_uniform(rng, 0.5, 1e3);
  return k;
}

}  // namespace

InequalityReport check_ratio_inequalities(std::size_t samples, RngStream& rng) {
  InequalityReport report;
  const double tol = stats::kInequalityTol;

  InequalityResult adj{"adjacent_ratio", 0, 0, 0, -1e300};
  for (std::size_t s = 0; s < samples; ++s) {
    const double k1 = log_uniform(rng, 1e-6, 1e6);
    const double k2 = log_uniform(rng, 1e-6, 1e6);
    const double k3 = log_uniform(rng, 1e-6, 1e6);
    const double excess = adjacent_ratio_lhs(k1, k2, k3) - adjacent_ratio_rhs(k1, k2, k3);
    ++adj.instances;
    adj.worst_excess = std::max(adj.worst_excess, excess);
    if (excess > tol) ++adj.violations;
    // Equality case: k1 + k2 = sqrt(k1 (k1 + k2 + k3)).
    const double e1 = log_uniform(rng, 1e-3, 1e3);
    const double e2 = log_uniform(rng, 1e-3, 1e3);
    const double e3 = (e1 + e2) * (e1 + e2) / e1 - e1 - e2;
    const double err = std::abs(adjacent_ratio_lhs(e1, e2, e3) - adjacent_ratio_rhs(e1, e2, e3));
    report.equality_max_error = std::max(report.equality_max_error, err);
  }

  InequalityResult prefix{"prefix_ratio", 0, 0, 0, -1e300};
  while (prefix.instances < samples) {
    const std::size_t r = 2 + rng.uniform_below(39);
    const auto k = random_sequence(rng, r);
    if (!valid_prefix_instance(k)) {
      ++prefix.rejected;
      continue;
    }
    const double excess = prefix_ratio_lhs(k) - prefix_ratio_rhs(k);
    ++prefix.instances;
    prefix.worst_excess = std::max(prefix.worst_excess, excess);
    if (excess > tol) ++prefix.violations;
  }

  InequalityResult windowed{"windowed_ratio", 0, 0, 0, -1e300};
  while (windowed.instances < samples) {
    const int d = 1 + static_cast<int>(rng.uniform_below(6));
    const std::size_t r = 2 * d + rng.uniform_below(40);
    const auto k = random_sequence(rng, r);
    if (!valid_windowed_instance(k, d)) {
      ++windowed.rejected;
      continue;
    }
    const double excess = windowed_ratio_lhs(k, d) - windowed_ratio_rhs(k, d);
    ++windowed.instances;
    windowed.worst_excess = std::max(windowed.worst_excess, excess);
    if (excess > tol) ++windowed.violations;
  }

  report.inequalities = {adj, prefix, windowed};
  report.passed = report.equality_max_error <= tol;
  for (const auto& l : report.inequalities) report.passed = report.passed && l.violations == 0;
  return report;
}

}  // namespace dldd

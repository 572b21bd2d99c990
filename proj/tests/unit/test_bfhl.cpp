#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "../support/oracles.hpp"
#include "dldd/bfhl.hpp"
#include "dldd/io.hpp"
#include "dldd/verify.hpp"

using namespace dldd;

namespace {

void require_structure(const Digraph& g, const OrderedClustering& c, Length D) {
  const StructureReport rep = check_structure(g, c, D);
  for (const auto& chk : rep.checks) REQUIRE_MESSAGE(chk.passed, chk.name, ": ", chk.detail);
}

}  // namespace

TEST_CASE("schedule follows the closed forms") {
  for (std::size_t m0 : {1u, 7u, 16u, 64u, 1000u, 100000u}) {
    for (Length D : {1, 8, 33, 64, 1000, 123456}) {
      const std::size_t n0 = m0 / 2 + 1;
      const std::size_t mass = n0;
      const BfhlSchedule s = make_bfhl_schedule(m0, n0, D, mass);
      const double big = std::max<double>({double(m0), double(n0), 4.0});
      const int L = static_cast<int>(std::ceil(std::log2(std::log2(big)) - 1e-12)) + 1;
      CHECK(s.L == L);
      CHECK(s.delta == doctest::Approx(std::pow(std::log2(std::max<double>(m0, 2)), -10)));
      REQUIRE(s.r.size() == static_cast<std::size_t>(L + 1));
      CHECK(s.r[0] == 0);
      for (int l = 1; l <= L; ++l) {
        const Length geo = static_cast<Length>(std::floor(double(D) / std::pow(2.0, L - l + 3)));
        CHECK(s.r[l] == s.r[l - 1] + geo + D / (4 * L));
        if (!s.degenerate(l)) {
          const double p = 2 * std::log(2 * double(s.s[l - 1]) / s.delta) / double(s.r[l] - s.r[l - 1]);
          CHECK(s.rate(l) == doctest::Approx(p));
        }
      }
      CHECK(s.r[L] <= D);
      for (int l = 0; l <= L; ++l) {
        const double pow2 = std::pow(2.0, std::pow(2.0, L - l));
        CHECK(double(s.s[l]) == std::min(pow2, double(mass + 1)));
      }
      CHECK(s.is_long(D));
      CHECK(s.is_long((D + 4 * L - 1) / (4 * L)));
      if (D / (4 * L) >= 1 && D % (4 * L) != 0) CHECK(!s.is_long(D / (4 * L)));
    }
  }
}

TEST_CASE("cutting procedure carves nothing when every small ball fails the size test") {
  const Digraph empty(64);
  const BfhlSchedule s = make_bfhl_schedule(0, 64, 64, 64);
  RngStream rng(1, 0);
  const auto cut = cutting_procedure(empty, s, s.L, rng);
  CHECK(cut.balls.empty());
  CHECK(cut.cut_edges.empty());
  CHECK(cut.remaining.size() == 64);
}

TEST_CASE("cutting procedure on the unit 64-cycle at the top level") {
  const Digraph g = cycle_graph(64);
  const BfhlSchedule s = make_bfhl_schedule(64, 64, 32, 64);
  REQUIRE(s.L == 4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed, 0);
    const auto cut = cutting_procedure(g, s, s.L, rng);
    CHECK(cut.balls.size() >= 1);
    CHECK(cut.balls.size() <= 2 * s.s[s.L - 1]);
    std::vector<char> seen(64, 0);
    std::size_t carved = 0;
    for (std::size_t b = 0; b < cut.balls.size(); ++b) {
      CHECK(cut.radii[b] >= s.r[s.L - 1]);
      CHECK(cut.radii[b] < s.r[s.L]);
      for (VertexId v : cut.balls[b]) {
        CHECK(!seen[v]);
        seen[v] = 1;
        ++carved;
      }
    }
    CHECK(carved + cut.remaining.size() == 64);
    for (VertexId v : cut.remaining) CHECK(!seen[v]);
    // S is exactly the union of ball out-boundaries at carving time.
    std::set<EdgeId> expect;
    std::vector<char> gone(64, 0);
    for (const auto& ball : cut.balls) {
      std::vector<char> in(64, 0);
      for (VertexId v : ball) in[v] = 1;
      for (VertexId v : ball)
        for (EdgeId e : g.out_edges(v))
          if (!in[g.edge(e).head] && !gone[g.edge(e).head]) expect.insert(e);
      for (VertexId v : ball) gone[v] = 1;
    }
    CHECK(std::set<EdgeId>(cut.cut_edges.begin(), cut.cut_edges.end()) == expect);
  }
}

TEST_CASE("decompose_bfhl small examples") {
  const auto one = decompose_bfhl(Digraph(1), 4, 0);
  CHECK(one.clusters == std::vector<std::vector<VertexId>>{{0}});
  CHECK(one.cut_edges.empty());

  const auto two = decompose_bfhl(Digraph(2), 4, 0);
  CHECK(two.clusters.size() == 2);
  CHECK(two.cut_edges.empty());

  CHECK_THROWS_AS(decompose_bfhl(Digraph(2), 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(decompose_bfhl(Digraph(2), max_diameter_param(2) + 1, 0), std::invalid_argument);
}

TEST_CASE("decompose_bfhl invariants and trace properties on random graphs") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 120; ++trial) {
    const VertexId n = 2 + static_cast<VertexId>(gen() % 120);
    const double p = (1.0 + double(gen() % 40) / 10.0) / n;
    const Digraph g = oracle::random_digraph(gen, n, p, 1 + gen() % 4);
    const Length D = 4 + static_cast<Length>(gen() % 80);
    const std::uint64_t seed = gen();
    BfhlTrace trace;
    BfhlOptions opt;
    opt.trace = &trace;
    opt.check_invariants = true;
    const OrderedClustering c = decompose_bfhl(g, D, seed, opt);
    require_structure(g, c, D);
    CHECK(c == decompose_bfhl(g, D, seed));

    const BfhlSchedule top = make_bfhl_schedule(g.num_edges(), n, D, n);
    const auto at = cluster_assignment(c, n);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const bool in_s = std::binary_search(c.cut_edges.begin(), c.cut_edges.end(), e);
      if (top.is_long(g.edge(e).length)) {
        CHECK(in_s);
      } else {
        // Ball boundaries point against the carving order, so S holds exactly the backward short edges.
        CHECK(in_s == is_cut(at, g, e));
      }
    }
    const double depth_bound = 10.0 * std::log2(std::max<double>(g.num_edges(), 2));
    CHECK(trace.max_depth <= depth_bound);

    std::set<std::uint64_t> streams;
    std::map<std::tuple<std::uint64_t, int, int>, std::size_t> per_call;
    for (const auto& b : trace.balls) {
      CHECK(b.radius >= b.lo);
      CHECK(b.radius < b.hi);
      CHECK(b.radius < D);
      CHECK(streams.insert(b.stream_id).second);
      per_call[{b.invocation, b.level, b.phase == Direction::kOut ? 0 : 1}] += 1;
    }
    for (const auto& b : trace.balls) {
      // s_{l-1} of that invocation is at most mass + 1 <= n + 1, and at most 2^(2^(L-l+1)).
      const auto count = per_call[{b.invocation, b.level, b.phase == Direction::kOut ? 0 : 1}];
      const double cap = std::min(std::pow(2.0, std::pow(2.0, top.L - b.level + 1)), double(n) + 1);
      CHECK(double(count) <= 2 * cap);
    }
  }
}

TEST_CASE("ball budget per cutting invocation uses the invocation's s") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Digraph g = bipath_graph(300);
    BfhlTrace trace;
    BfhlOptions opt;
    opt.trace = &trace;
    decompose_bfhl(g, 96, seed, opt);
    std::map<std::tuple<std::uint64_t, int, int>, std::size_t> per_call;
    for (const auto& b : trace.balls) per_call[{b.invocation, b.level, int(b.phase)}] += 1;
    // The top invocation always has mass n.
    const BfhlSchedule s = make_bfhl_schedule(g.num_edges(), 300, 96, 300);
    for (const auto& [key, count] : per_call) {
      if (std::get<0>(key) != 0) continue;
      CHECK(count <= 2 * s.s[std::get<1>(key) - 1]);
    }
  }
}

TEST_CASE("top-level radii follow the truncated exponential law") {
  // Directed path with long arcs so that the top level carves and the rate is small.
  std::vector<Edge> arcs;
  for (VertexId i = 0; i + 1 < 64; ++i) arcs.push_back({i, i + 1, 64});
  const Digraph g(64, arcs);
  const Length D = 4096;
  const BfhlSchedule s = make_bfhl_schedule(g.num_edges(), 64, D, 64);
  const int L = s.L;
  const TruncExpParams params{s.rate(L), s.r[L - 1], s.r[L]};
  REQUIRE(params.rate < 0.1);
  std::map<Length, double> counts;
  double total = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    BfhlTrace trace;
    BfhlOptions opt;
    opt.trace = &trace;
    decompose_bfhl(g, D, seed, opt);
    for (const auto& b : trace.balls) {
      if (b.depth == 0 && b.level == L && b.phase == Direction::kOut) {
        counts[b.radius] += 1;
        total += 1;
      }
    }
  }
  REQUIRE(total > 1000);
  // Pool support points with expected count below 5 into their neighbor.
  double chi = 0, obs = 0, exp = 0;
  int bins = 0;
  for (Length x = params.lo; x < params.hi; ++x) {
    obs += counts[x];
    exp += total * trunc_exp_pmf(params, x);
    const double rest = x + 1 < params.hi ? total * trunc_exp_interval_mass(params, x + 1, params.hi - x - 1) : 0;
    if (exp >= 5 && (x + 1 == params.hi || rest >= 5)) {
      chi += (obs - exp) * (obs - exp) / exp;
      ++bins;
      obs = exp = 0;
    }
  }
  REQUIRE(bins >= 10);
  boost::math::chi_squared dist(bins - 1);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi)) >= stats::kChiSquareAlpha);
}

TEST_CASE("mean cut rate on the unit path P_256 with D = 64") {
  const Digraph g = path_graph(256);
  const Length D = 64;
  double cut = 0;
  const int seeds = 2000;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto c = decompose_bfhl(g, D, static_cast<std::uint64_t>(seed));
    if (seed < 200) require_structure(g, c, D);
    const auto at = cluster_assignment(c, g.num_vertices());
    for (EdgeId e = 0; e < g.num_edges(); ++e) cut += is_cut(at, g, e);
  }
  const double rate = cut / (double(seeds) * double(g.num_edges()));
  const double ln_n = std::log(256.0);
  CHECK(rate >= 1.0 / 64);
  CHECK(rate <= 50 * ln_n * std::log(ln_n) / 64);
}

TEST_CASE("sampled estimator keeps the structural guarantees") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Digraph g = oracle::random_digraph(gen, 150, 3.0 / 150, 2);
    BfhlOptions opt;
    opt.estimator = EstimatorKind::kSampled;
    const auto c = decompose_bfhl(g, 40, trial, opt);
    require_structure(g, c, 40);
  }
}

TEST_CASE("doubling D lowers the cut fraction on unit paths") {
  const Digraph g = path_graph(256);
  auto rate = [&](Length D) {
    double cut = 0;
    for (std::uint64_t seed = 0; seed < 600; ++seed) {
      const auto c = decompose_bfhl(g, D, seed);
      const auto at = cluster_assignment(c, g.num_vertices());
      for (EdgeId e = 0; e < g.num_edges(); ++e) cut += is_cut(at, g, e);
    }
    return cut / (600.0 * double(g.num_edges()));
  };
  const double r32 = rate(32), r64 = rate(64);
  REQUIRE(r64 > 0);
  CHECK(r32 / r64 >= 1.2);
  CHECK(r32 / r64 <= 8.0);
}

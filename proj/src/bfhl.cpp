#include "dldd/bfhl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dldd {

int ceil_log2(std::size_t x) {
  int k = 0;
  while ((std::size_t{1} << k) < x) ++k;
  return k;
}

namespace {

std::uint64_t level_size(int exponent, std::size_t mass) {
  // min(2^(2^exponent), mass + 1)
  const std::uint64_t cap = static_cast<std::uint64_t>(mass) + 1;
  if (exponent >= 6) return cap;
  const int bits = 1 << exponent;
  if (bits >= 63) return cap;
  return std::min<std::uint64_t>(std::uint64_t{1} << bits, cap);
}

}  // namespace

BfhlSchedule make_bfhl_schedule(std::size_t m0, std::size_t n0, Length D, std::size_t mass) {
  if (D < 1) throw std::invalid_argument("schedule: D must be positive");
  BfhlSchedule s;
  s.m0 = m0;
  s.n0 = n0;
  s.mass = mass;
  s.D = D;
  const double big = static_cast<double>(std::max<std::size_t>({m0, n0, 4}));
  s.L = static_cast<int>(std::ceil(std::log2(std::log2(big)) - 1e-12)) + 1;
  s.delta = std::pow(std::log2(static_cast<double>(std::max<std::size_t>(m0, 2))), -10.0);
  s.r.assign(s.L + 1, 0);
  s.s.assign(s.L + 1, 0);
  const Length share = D / (4 * static_cast<Length>(s.L));
  for (int l = 1; l <= s.L; ++l) {
    const int shift = s.L - l + 3;
    const Length geometric = shift >= 62 ? 0 : D >> shift;
    s.r[l] = s.r[l - 1] + geometric + share;
  }
  for (int l = 0; l <= s.L; ++l) s.s[l] = level_size(s.L - l, mass);
  return s;
}

double BfhlSchedule::rate(int level) const {
  const double width = static_cast<double>(r[level] - r[level - 1]);
  return 2.0 * std::log(2.0 * static_cast<double>(s[level - 1]) / delta) / width;
}

bool BfhlSchedule::is_long(Length length) const {
  return 4 * static_cast<Length>(L) * length >= D;
}

std::size_t BfhlSchedule::rounds() const {
  return static_cast<std::size_t>(ceil_log2(n0)) + 1;
}

std::uint64_t BfhlSchedule::picks_per_round(int level) const {
  const auto lg = static_cast<std::uint64_t>(std::max(1, ceil_log2(n0)));
  return s[level - 1] * 100 * lg;
}

Length max_diameter_param(std::size_t n) {
  const Length len = max_edge_length(n);
  const Length count = static_cast<Length>(std::max<std::size_t>(n, 1));
  constexpr Length kCap = Length{1} << 62;
  return len > kCap / count ? kCap : len * count;
}

namespace {

/// Vertex set with O(1) insert, erase and uniform pick.
class IndexedSet {
 public:
  explicit IndexedSet(VertexId n) : pos_(n, kAbsent) {}
  bool contains(VertexId v) const { return pos_[v] != kAbsent; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  void insert(VertexId v) {
    if (contains(v)) return;
    pos_[v] = static_cast<VertexId>(items_.size());
    items_.push_back(v);
  }
  void erase(VertexId v) {
    if (!contains(v)) return;
    const VertexId last = items_.back();
    items_[pos_[v]] = last;
    pos_[last] = pos_[v];
    items_.pop_back();
    pos_[v] = kAbsent;
  }
  VertexId at(std::size_t i) const { return items_[i]; }
  std::span<const VertexId> items() const { return items_; }
  void clear() {
    for (VertexId v : items_) pos_[v] = kAbsent;
    items_.clear();
  }

 private:
  static constexpr VertexId kAbsent = std::numeric_limits<VertexId>::max();
  std::vector<VertexId> pos_;
  std::vector<VertexId> items_;
};

}  // namespace

CuttingResult cutting_procedure(const Digraph& graph, const BfhlSchedule& schedule, int level,
                                RngStream& rng, Direction phase, std::span<const char> alive_in,
                                EstimatorKind estimator, std::uint64_t* ball_counter) {
  if (level < 1 || level > schedule.L) throw std::invalid_argument("cutting: bad level");
  const VertexId n = graph.num_vertices();
  std::vector<char> alive(n, 1);
  if (!alive_in.empty()) std::copy(alive_in.begin(), alive_in.end(), alive.begin());
  std::uint64_t local_counter = 0;
  std::uint64_t& counter = ball_counter ? *ball_counter : local_counter;

  CuttingResult result;
  const std::uint64_t mass = schedule.mass;
  const std::uint64_t s0 = schedule.s[level - 1];
  const std::uint64_t s1 = schedule.s[level];
  const Length r0 = schedule.r[level - 1];
  const Length r1 = schedule.r[level];
  const TruncExpParams radius_law{schedule.rate(level), r0, r1};

  std::vector<VertexId> alive_list;
  for (VertexId v = 0; v < n; ++v)
    if (alive[v]) alive_list.push_back(v);

  // Good iff b1(v) <= 9/8 * M / s1.
  const std::uint64_t good_cap = (9 * mass) / (8 * s1);
  std::vector<std::size_t> b1;
  if (estimator == EstimatorKind::kExact) {
    b1 = ball_sizes_capped(graph, alive_list, r1, phase, good_cap, alive);
  } else {
    const auto sketch = sketch_ball_sizes(graph, r1, phase, default_sketch_size(schedule.n0),
                                          rng.next(), alive);
    for (VertexId v : alive_list) b1.push_back(sketch[v]);
  }
  IndexedSet candidates(n);  // good, not yet known to fail the ball-mass test
  IndexedSet failing(n);     // good, known to fail it (balls only shrink)
  for (std::size_t i = 0; i < alive_list.size(); ++i)
    if (b1[i] <= good_cap) candidates.insert(alive_list[i]);

  // Ball-mass test passes iff 2 s0 |B(v, r0)| >= M.
  const std::uint64_t need = (mass + 2 * s0 - 1) / (2 * s0);
  // Demote iff 8 s0 b0(v) < 7 M.
  const std::uint64_t keep = (7 * mass + 8 * s0 - 1) / (8 * s0);

  BoundedSearch search(graph);
  std::vector<char> in_ball(n, 0);
  const Direction dir = phase;

  auto passes_test = [&](VertexId v) {
    if (need <= 1) return true;
    std::size_t count = 0;
    const VertexId src[] = {v};
    search.run(
        src, dir, r0,
        [&](VertexId, Length) {
          ++count;
          return count < need;
        },
        alive);
    return count >= need;
  };

  auto carve = [&](VertexId v) {
    RngStream ball_rng = rng.substream(2 * counter);
    const std::uint64_t stream = ball_rng.stream_id();
    ++counter;
    const Length radius = sample_trunc_exp(radius_law, ball_rng);
    std::vector<VertexId> ball;
    const VertexId src[] = {v};
    search.run(
        src, dir, radius,
        [&](VertexId x, Length) {
          ball.push_back(x);
          return true;
        },
        alive);
    for (VertexId x : ball) in_ball[x] = 1;
    for (VertexId x : ball) {
      for (EdgeId e : graph.incident(x, dir)) {
        const VertexId y = graph.far_end(e, dir);
        if (alive[y] && !in_ball[y]) result.cut_edges.push_back(e);
      }
    }
    for (VertexId x : ball) {
      in_ball[x] = 0;
      alive[x] = 0;
      candidates.erase(x);
      failing.erase(x);
    }
    std::sort(ball.begin(), ball.end());
    result.balls.push_back(std::move(ball));
    result.radii.push_back(radius);
    result.centers.push_back(v);
    result.streams.push_back(stream);
  };

  const std::size_t rounds = schedule.rounds();
  const std::uint64_t budget = schedule.picks_per_round(level);
  for (std::size_t round = 0; round < rounds; ++round) {
    if (candidates.empty() && failing.empty()) break;
    std::uint64_t remaining = budget;
    while (remaining > 0 && !candidates.empty()) {
      // Picks that land on a known-failing vertex change nothing; skip them in one draw.
      if (!failing.empty()) {
        const double q = static_cast<double>(candidates.size()) /
                         static_cast<double>(candidates.size() + failing.size());
        const double skipped = std::floor(std::log(rng.uniform_open_closed()) / std::log1p(-q));
        if (skipped >= static_cast<double>(remaining)) {
          remaining = 0;
          break;
        }
        remaining -= static_cast<std::uint64_t>(skipped);
      }
      --remaining;
      const VertexId v = candidates.at(rng.uniform_below(candidates.size()));
      if (!passes_test(v)) {
        candidates.erase(v);
        failing.insert(v);
        continue;
      }
      carve(v);
    }

    // Demote good vertices whose r0-ball fell below 7/8 * M / s0.
    failing.clear();
    if (candidates.empty()) continue;
    std::vector<VertexId> good(candidates.items().begin(), candidates.items().end());
    std::vector<std::size_t> b0;
    if (estimator == EstimatorKind::kExact) {
      b0 = ball_sizes_capped(graph, good, r0, phase, keep > 0 ? keep - 1 : 0, alive);
    } else {
      const auto sketch = sketch_ball_sizes(graph, r0, phase, default_sketch_size(schedule.n0),
                                            rng.next(), alive);
      for (VertexId v : good) b0.push_back(sketch[v]);
    }
    for (std::size_t i = 0; i < good.size(); ++i)
      if (b0[i] < keep) candidates.erase(good[i]);
  }

  std::sort(result.cut_edges.begin(), result.cut_edges.end());
  for (VertexId v = 0; v < n; ++v)
    if (alive[v]) result.remaining.push_back(v);
  return result;
}

namespace {

struct Context {
  std::size_t m0;
  std::size_t n0;
  Length D;
  int depth_limit;
  const BfhlOptions* options;
  std::uint64_t invocations = 0;
};

struct LocalResult {
  std::vector<std::vector<VertexId>> clusters;
  std::vector<EdgeId> cuts;
};

void check_order(const Digraph& g, const LocalResult& res) {
  OrderedClustering oc;
  oc.clusters = res.clusters;
  std::vector<char> in_s(g.num_edges(), 0);
  for (EdgeId e : res.cuts) in_s[e] = 1;
  for (EdgeId e : backward_edges(g, oc)) {
    if (!in_s[e]) throw std::logic_error("bfhl: backward edge outside the cut set");
  }
  std::size_t covered = 0;
  for (const auto& c : res.clusters) covered += c.size();
  if (covered != g.num_vertices()) throw std::logic_error("bfhl: clusters do not cover V");
}

LocalResult solve(const Digraph& g, std::span<const VertexId> to_root, RngStream rng, int depth,
                  Context& ctx) {
  const std::uint64_t invocation = ctx.invocations++;
  BfhlTrace* trace = ctx.options->trace;
  if (trace) {
    trace->invocations = ctx.invocations;
    trace->max_depth = std::max(trace->max_depth, depth);
  }
  if (depth > ctx.depth_limit) throw std::logic_error("bfhl: recursion depth limit exceeded");

  LocalResult out;
  const VertexId n = g.num_vertices();
  if (n == 0) return out;
  if (n == 1 || g.num_edges() == 0) {
    out.clusters = scc_condensation(g);
    return out;
  }

  const BfhlSchedule schedule = make_bfhl_schedule(ctx.m0, ctx.n0, ctx.D, n);

  // Long edges go straight into S.
  std::vector<Edge> short_edges;
  std::vector<EdgeId> to_g;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (schedule.is_long(g.edge(e).length)) {
      out.cuts.push_back(e);
    } else {
      short_edges.push_back(g.edge(e));
      to_g.push_back(e);
    }
  }
  const Digraph gs(n, std::move(short_edges));

  std::vector<char> alive(n, 1);
  std::vector<std::vector<VertexId>> front;
  std::vector<std::vector<std::vector<VertexId>>> back_blocks;
  std::uint64_t ball_counter = 0;
  std::uint64_t child_counter = 0;

  for (int level = schedule.L; level >= 1; --level) {
    if (schedule.degenerate(level)) continue;
    for (Direction phase : {Direction::kOut, Direction::kIn}) {
      bool any_alive = false;
      for (char a : alive) any_alive = any_alive || a;
      if (!any_alive) break;

      const CuttingResult cut = cutting_procedure(gs, schedule, level, rng, phase, alive,
                                                  ctx.options->estimator, &ball_counter);
      if (cut.balls.empty()) continue;
      if (trace) {
        for (std::size_t b = 0; b < cut.balls.size(); ++b) {
          trace->balls.push_back({depth, level, phase, to_root[cut.centers[b]], cut.radii[b],
                                  schedule.r[level - 1], schedule.r[level], cut.balls[b].size(),
                                  cut.streams[b], invocation});
        }
      }
      std::vector<char> removed(gs.num_edges(), 0);
      for (EdgeId e : cut.cut_edges) {
        removed[e] = 1;
        out.cuts.push_back(to_g[e]);
      }
      // One block per ball. Out-balls: a ball's boundary edges point at balls carved after it,
      // so later balls go first. In-balls: boundary edges come from later balls, so carving order.
      // Edges between balls are in S, so every SCC of the carved union sits inside one ball.
      std::vector<std::uint32_t> ball_of(n, 0);
      std::vector<char> carved(n, 0);
      for (std::uint32_t b = 0; b < cut.balls.size(); ++b) {
        for (VertexId x : cut.balls[b]) {
          ball_of[x] = b;
          carved[x] = 1;
          alive[x] = 0;
        }
      }
      std::vector<std::vector<std::vector<VertexId>>> ball_blocks(cut.balls.size());
      SubgraphExtractor extractor(gs);
      for (auto& comp : scc_condensation(gs, carved, removed)) {
        auto& block = ball_blocks[ball_of[comp.front()]];
        if (ctx.options->check_invariants) {
          for (VertexId x : comp)
            if (ball_of[x] != ball_of[comp.front()]) throw std::logic_error("bfhl: SCC spans two balls");
        }
        if (comp.size() == 1) {
          block.push_back(std::move(comp));
          continue;
        }
        const Subgraph sub = extractor.extract(comp);
        std::vector<VertexId> child_root(comp.size());
        for (std::size_t i = 0; i < comp.size(); ++i) child_root[i] = to_root[comp[i]];
        LocalResult child = solve(sub.graph, child_root, rng.substream(2 * child_counter + 1),
                                  depth + 1, ctx);
        ++child_counter;
        for (auto& c : child.clusters) {
          for (auto& v : c) v = sub.to_parent_vertex[v];
          block.push_back(std::move(c));
        }
        for (EdgeId e : child.cuts) out.cuts.push_back(to_g[sub.to_parent_edge[e]]);
      }
      if (phase == Direction::kOut) {
        std::vector<std::vector<VertexId>> merged;
        for (auto it = ball_blocks.rbegin(); it != ball_blocks.rend(); ++it)
          for (auto& c : *it) merged.push_back(std::move(c));
        back_blocks.push_back(std::move(merged));
      } else {
        for (auto& block : ball_blocks)
          for (auto& c : block) front.push_back(std::move(c));
      }
    }
  }

  out.clusters = std::move(front);
  for (auto& c : scc_condensation(gs, alive, {})) out.clusters.push_back(std::move(c));
  // Out-phase blocks carved later sit before those carved earlier.
  for (auto it = back_blocks.rbegin(); it != back_blocks.rend(); ++it)
    for (auto& c : *it) out.clusters.push_back(std::move(c));

  if (ctx.options->check_invariants) check_order(g, out);
  return out;
}

}  // namespace

OrderedClustering decompose_bfhl(const Digraph& graph, Length D, std::uint64_t seed,
                                 const BfhlOptions& options) {
  if (D < 1) throw std::invalid_argument("decompose_bfhl: D must be positive");
  if (D > max_diameter_param(graph.num_vertices())) {
    throw std::invalid_argument("decompose_bfhl: D exceeds the polynomial bound");
  }
  Context ctx{graph.num_edges(), graph.num_vertices(), D,
              64 + 20 * ceil_log2(std::max<std::size_t>(graph.num_vertices(), 2)), &options};
  std::vector<VertexId> identity(graph.num_vertices());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) identity[v] = v;
  LocalResult res = solve(graph, identity, RngStream(seed, 0), 0, ctx);

  OrderedClustering out;
  out.diameter = D;
  out.clusters = std::move(res.clusters);
  for (auto& c : out.clusters) std::sort(c.begin(), c.end());
  out.cut_edges = std::move(res.cuts);
  std::sort(out.cut_edges.begin(), out.cut_edges.end());
  out.cut_edges.erase(std::unique(out.cut_edges.begin(), out.cut_edges.end()),
                      out.cut_edges.end());
  return out;
}

}  // namespace dldd

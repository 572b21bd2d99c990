#include "dldd/separated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dldd/bfhl.hpp"
#include "dldd/estimator.hpp"

namespace dldd {

SepSchedule make_sep_schedule(std::size_t m, std::size_t m0, Length D, Length d) {
  if (D < 1) throw std::invalid_argument("separated: D must be positive");
  if (d < 0) throw std::invalid_argument("separated: d must be nonnegative");
  SepSchedule s;
  s.D = D;
  s.d = d;
  const double lm = std::log2(static_cast<double>(std::max<std::size_t>(m, 2)));
  s.L = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(lm, 1.0)) - 1e-12)));
  s.ln_mD = std::log(static_cast<double>(std::max<std::size_t>(m0, 1)) * static_cast<double>(D));
  const double Dd = static_cast<double>(D);
  double acc = Dd / 8.0;
  s.a.push_back(static_cast<Length>(std::floor(acc)));
  for (int j = 1; j <= s.L; ++j) {
    acc -= Dd / 16.0 * std::max(1.0 / s.L, std::ldexp(1.0, -j));
    s.a.push_back(std::max<Length>(0, static_cast<Length>(std::floor(acc + 1e-9))));
  }
  for (int i = 1; i <= s.L; ++i)
    if (s.a[i] >= s.a[i - 1]) s.degenerate = true;
  return s;
}

std::pair<Length, Length> SepSchedule::range(int i) const {
  const Length hi = a[i - 1];
  const Length lo = std::min(a[i], hi - 1);
  return {lo, hi};
}

double SepSchedule::sample_probability(std::size_t degree, std::size_t m, int i) const {
  const double deg = static_cast<double>(std::max<std::size_t>(degree, 1));
  const double boost = std::ldexp(1.0, std::min(1 << std::min(i, 20), 2000));
  const double p = 2.0 * deg / static_cast<double>(m) * boost * ln_mD;
  return std::isnan(p) ? 1.0 : std::min(p, 1.0);
}

HeavyLightLabels label_heavy_light(const Digraph& graph, Length D) {
  const VertexId n = graph.num_vertices();
  HeavyLightLabels labels;
  labels.in_heavy.assign(n, 0);
  labels.out_heavy.assign(n, 0);
  const std::size_t m = graph.num_edges();
  if (m == 0) return labels;
  const std::size_t need = (m + 1) / 2;  // 2 * count >= m
  const Length radius = D / 8;
  const auto in_counts = ball_edges_capped(graph, radius, Direction::kIn, need - 1);
  const auto out_counts = ball_edges_capped(graph, radius, Direction::kOut, need - 1);
  for (VertexId v = 0; v < n; ++v) {
    labels.in_heavy[v] = in_counts[v] >= need;
    labels.out_heavy[v] = out_counts[v] >= need;
  }
  return labels;
}

double separation_regime_limit(std::size_t n, Length D) {
  const double ll = std::log2(std::max(std::log2(static_cast<double>(std::max<std::size_t>(n, 2))), 1.0));
  return static_cast<double>(D) / (8.0 * std::max(1.0, ll));
}

namespace {

using Order = std::vector<std::vector<VertexId>>;

struct Context {
  std::size_t m0;
  Length D;
  Length d;
  int depth_limit;
  SepTrace* trace;
  std::uint64_t invocations = 0;
  bool degenerate = false;
};

struct LocalResult {
  Order order;
  MarkVector marks;
};

/// Per-invocation state: U, sigma^-, sigma^+ (stored as blocks, newest last) and marks.
class Invocation {
 public:
  Invocation(const Digraph& g, std::span<const VertexId> to_root, RngStream rng, int depth,
             Context& ctx)
      : g_(g), to_root_(to_root), rng_(std::move(rng)), depth_(depth), ctx_(ctx),
        search_(g), extractor_(g), in_u_(g.num_vertices(), 1), marks_(g.num_vertices(), 0) {}

  LocalResult run();

 private:
  void record_annulus(std::span<const VertexId> centers, Direction dir, Length r,
                      std::span<const VertexId> scope);
  /// Distances from `centers` in direction dir up to r + d; marks scope vertices in the annulus
  /// and returns the vertices at distance <= r (unsorted).
  std::vector<VertexId> mark_and_ball(std::span<const VertexId> centers, Direction dir, Length r,
                                      const std::vector<char>* scope);
  LocalResult recurse(const std::vector<VertexId>& subset);
  void merge_marks(const std::vector<VertexId>& subset, const MarkVector& child_marks);
  void run_iterations(bool minus_first);
  void run_iteration(int i, Direction sign);
  void heavy_pair(VertexId s, VertexId t);
  void heavy_disjoint(const HeavyLightLabels& labels);
  std::pair<Length, Length> widen(Length lo, Length hi);

  const Digraph& g_;
  std::span<const VertexId> to_root_;
  RngStream rng_;
  int depth_;
  Context& ctx_;
  BoundedSearch search_;
  SubgraphExtractor extractor_;
  SepSchedule schedule_;
  SepCase kind_ = SepCase::kBase;
  std::uint64_t id_ = 0;
  std::uint64_t child_counter_ = 0;
  std::vector<char> in_u_;
  std::size_t u_size_ = 0;
  MarkVector marks_;
  Order minus_;
  std::vector<Order> plus_blocks_;
};

std::pair<Length, Length> Invocation::widen(Length lo, Length hi) {
  if (lo < hi) return {lo, hi};
  ctx_.degenerate = true;
  return {hi - 1, hi};
}

void Invocation::record_annulus(std::span<const VertexId> centers, Direction dir, Length r,
                                std::span<const VertexId> scope) {
  if (!ctx_.trace) return;
  SepTrace::Annulus a;
  a.invocation = id_;
  for (VertexId c : centers) a.centers.push_back(to_root_[c]);
  a.direction = dir;
  a.r = r;
  a.d = ctx_.d;
  for (VertexId x : scope) a.scope.push_back(to_root_[x]);
  ctx_.trace->annuli.push_back(std::move(a));
}

std::vector<VertexId> Invocation::mark_and_ball(std::span<const VertexId> centers, Direction dir,
                                                Length r, const std::vector<char>* scope) {
  const Length d = ctx_.d;
  std::vector<VertexId> inside;
  std::vector<VertexId> marked_scope;
  search_.run(centers, dir, r + d, [&](VertexId x, Length dist) {
    const bool in_scope = !scope || (*scope)[x];
    if (dist <= r) inside.push_back(x);
    if (in_scope && dist > r - d) {
      marks_[x] = 1;
      if (ctx_.trace) marked_scope.push_back(x);
    }
    return true;
  });
  if (ctx_.trace) {
    std::vector<VertexId> scope_list;
    for (VertexId x = 0; x < g_.num_vertices(); ++x)
      if (!scope || (*scope)[x]) scope_list.push_back(x);
    record_annulus(centers, dir, r, scope_list);
  }
  return inside;
}

LocalResult Invocation::recurse(const std::vector<VertexId>& subset) {
  const Subgraph sub = extractor_.extract(subset);
  std::vector<VertexId> child_root(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) child_root[i] = to_root_[subset[i]];
  Invocation child(sub.graph, child_root, rng_.substream(child_counter_++), depth_ + 1, ctx_);
  LocalResult res = child.run();
  for (auto& c : res.order)
    for (auto& v : c) v = sub.to_parent_vertex[v];
  return res;
}

void Invocation::merge_marks(const std::vector<VertexId>& subset, const MarkVector& child_marks) {
  for (std::size_t i = 0; i < subset.size(); ++i)
    marks_[subset[i]] = marks_[subset[i]] | child_marks[i];
}

void Invocation::run_iteration(int i, Direction sign) {
  if (ctx_.trace) ctx_.trace->iterations.push_back({id_, kind_, i, sign});
  const auto [lo, hi] = schedule_.range(i);
  if (schedule_.a[i] >= schedule_.a[i - 1]) ctx_.degenerate = true;
  const Length r = sample_uniform_int(lo, hi, rng_);
  const std::size_t m = g_.num_edges();
  std::vector<VertexId> sampled;
  for (VertexId v = 0; v < g_.num_vertices(); ++v) {
    if (!in_u_[v]) continue;
    if (sample_bernoulli(schedule_.sample_probability(g_.degree(v), m, i), rng_))
      sampled.push_back(v);
  }
  shuffle(std::span<VertexId>(sampled), rng_);
  for (VertexId v : sampled) {
    const VertexId src[] = {v};
    std::vector<VertexId> ball = mark_and_ball(src, sign, r, &in_u_);
    std::erase_if(ball, [&](VertexId x) { return !in_u_[x]; });
    if (ball.empty()) continue;
    std::sort(ball.begin(), ball.end());
    LocalResult child = recurse(ball);
    for (VertexId x : ball) in_u_[x] = 0;
    u_size_ -= ball.size();
    merge_marks(ball, child.marks);
    if (sign == Direction::kIn) {
      for (auto& c : child.order) minus_.push_back(std::move(c));
    } else {
      plus_blocks_.push_back(std::move(child.order));
    }
  }
}

void Invocation::run_iterations(bool minus_first) {
  for (int i = 1; i <= schedule_.L; ++i) {
    if (u_size_ == 0) break;
    const bool odd = (i % 2) == 1;
    const Direction sign = (odd == minus_first) ? Direction::kIn : Direction::kOut;
    run_iteration(i, sign);
  }
}

void Invocation::heavy_pair(VertexId s, VertexId t) {
  const auto [lo, hi] = widen(ctx_.D / 8, ctx_.D / 4);
  const Length r = sample_uniform_int(lo, hi, rng_);
  const VertexId n = g_.num_vertices();

  const VertexId src_s[] = {s};
  const std::vector<VertexId> in_ball = mark_and_ball(src_s, Direction::kIn, r, nullptr);
  std::vector<char> in_s(n, 0);
  for (VertexId x : in_ball) in_s[x] = 1;

  std::vector<VertexId> outside;
  for (VertexId v = 0; v < n; ++v)
    if (!in_s[v]) outside.push_back(v);
  Order plus;
  if (!outside.empty()) {
    LocalResult child = recurse(outside);
    merge_marks(outside, child.marks);
    plus = std::move(child.order);
  }
  plus_blocks_.push_back(std::move(plus));

  const VertexId src_t[] = {t};
  const std::vector<VertexId> out_ball = mark_and_ball(src_t, Direction::kOut, r, &in_s);
  std::vector<char> out_t(n, 0);
  for (VertexId x : out_ball) out_t[x] = 1;
  std::vector<VertexId> rest, central;
  for (VertexId v = 0; v < n; ++v) {
    if (!in_s[v]) continue;
    (out_t[v] ? central : rest).push_back(v);
  }
  if (!rest.empty()) {
    LocalResult child = recurse(rest);
    merge_marks(rest, child.marks);
    for (auto& c : child.order) minus_.push_back(std::move(c));
  }
  if (!central.empty()) minus_.push_back(std::move(central));
  std::fill(in_u_.begin(), in_u_.end(), 0);
  u_size_ = 0;
}

void Invocation::heavy_disjoint(const HeavyLightLabels& labels) {
  const auto [lo, hi] = widen(ctx_.D / 16, ctx_.D / 8);
  const Length r = sample_uniform_int(lo, hi, rng_);
  const VertexId n = g_.num_vertices();
  std::vector<VertexId> out_heavy, in_heavy;
  for (VertexId v = 0; v < n; ++v) {
    if (labels.out_heavy[v]) out_heavy.push_back(v);
    if (labels.in_heavy[v]) in_heavy.push_back(v);
  }
  // B^in: in-balls around out-heavy vertices; B^out: out-balls around in-heavy vertices.
  std::vector<VertexId> b_in, b_out;
  search_.run(out_heavy, Direction::kIn, r, [&](VertexId x, Length) {
    b_in.push_back(x);
    return true;
  });
  search_.run(in_heavy, Direction::kOut, r, [&](VertexId x, Length) {
    b_out.push_back(x);
    return true;
  });
  const std::size_t e_in = edges_within(g_, b_in);
  const std::size_t e_out = edges_within(g_, b_out);

  const bool cut_out = e_in >= e_out;
  kind_ = cut_out ? SepCase::kHeavyDisjointOut : SepCase::kHeavyDisjointIn;
  if (ctx_.trace) ctx_.trace->invocations.back().kind = kind_;
  const auto& centers = cut_out ? in_heavy : out_heavy;
  const Direction dir = cut_out ? Direction::kOut : Direction::kIn;
  std::vector<VertexId> ball = mark_and_ball(centers, dir, r, nullptr);
  std::sort(ball.begin(), ball.end());
  LocalResult child = recurse(ball);
  merge_marks(ball, child.marks);
  for (VertexId x : ball) in_u_[x] = 0;
  u_size_ -= ball.size();
  if (cut_out) {
    plus_blocks_.push_back(std::move(child.order));
    run_iterations(true);
  } else {
    minus_ = std::move(child.order);
    run_iterations(false);
  }
}

LocalResult Invocation::run() {
  id_ = ctx_.invocations++;
  if (depth_ > ctx_.depth_limit) throw std::logic_error("separated: recursion depth limit exceeded");
  SepTrace* trace = ctx_.trace;
  if (trace) {
    trace->max_depth = std::max(trace->max_depth, depth_);
    trace->invocations.push_back({id_, depth_, SepCase::kBase,
                                  std::vector<VertexId>(to_root_.begin(), to_root_.end())});
  }
  const VertexId n = g_.num_vertices();
  const std::size_t m = g_.num_edges();
  u_size_ = n;
  if (m <= 1) {
    // At most one arc: singletons in topological order.
    return {scc_condensation(g_), marks_};
  }
  schedule_ = make_sep_schedule(m, ctx_.m0, ctx_.D, ctx_.d);
  if (schedule_.degenerate) ctx_.degenerate = true;

  const HeavyLightLabels labels = label_heavy_light(g_, ctx_.D);
  const bool any_in = std::find(labels.in_heavy.begin(), labels.in_heavy.end(), 1) !=
                      labels.in_heavy.end();
  const bool any_out = std::find(labels.out_heavy.begin(), labels.out_heavy.end(), 1) !=
                       labels.out_heavy.end();

  auto set_kind = [&](SepCase k) {
    kind_ = k;
    if (trace) trace->invocations.back().kind = k;
  };

  if (!any_in) {
    set_kind(SepCase::kNoInHeavy);
    run_iterations(true);
  } else if (!any_out) {
    set_kind(SepCase::kNoOutHeavy);
    run_iterations(false);
  } else {
    // Nearest out-heavy vertex from the in-heavy set within D/4, if any.
    std::vector<VertexId> sources;
    for (VertexId v = 0; v < n; ++v)
      if (labels.in_heavy[v]) sources.push_back(v);
    std::optional<std::pair<VertexId, VertexId>> pair;
    search_.run(sources, Direction::kOut, ctx_.D / 4, [&](VertexId x, Length) {
      if (!labels.out_heavy[x]) return true;
      pair.emplace(search_.origin(x), x);
      return false;
    });
    if (pair) {
      set_kind(SepCase::kHeavyPair);
      heavy_pair(pair->first, pair->second);
    } else {
      set_kind(SepCase::kHeavyDisjointOut);
      heavy_disjoint(labels);
    }
  }

  LocalResult out;
  out.order = std::move(minus_);
  for (auto it = plus_blocks_.rbegin(); it != plus_blocks_.rend(); ++it)
    for (auto& c : *it) out.order.push_back(std::move(c));
  out.marks = std::move(marks_);
  std::size_t covered = 0;
  for (const auto& c : out.order) covered += c.size();
  if (covered != n) throw std::logic_error("separated: clusters do not cover the invocation");
  return out;
}

}  // namespace

SeparatedResult decompose_separated(const Digraph& graph, Length D, Length d, std::uint64_t seed,
                                    const SepOptions& options) {
  if (D < 1) throw std::invalid_argument("decompose_separated: D must be positive");
  if (d < 0) throw std::invalid_argument("decompose_separated: d must be nonnegative");
  if (D > max_diameter_param(graph.num_vertices())) {
    throw std::invalid_argument("decompose_separated: D exceeds the polynomial bound");
  }
  const VertexId n = graph.num_vertices();
  Context ctx{graph.num_edges(), D, d,
              256 + 40 * ceil_log2(std::max<std::size_t>(graph.num_edges(), 2)), options.trace};
  std::vector<VertexId> identity(n);
  for (VertexId v = 0; v < n; ++v) identity[v] = v;
  Invocation root(graph, identity, RngStream(seed, 0), 0, ctx);
  LocalResult res = root.run();

  OrderedClustering raw;
  raw.diameter = D;
  raw.clusters = std::move(res.order);
  for (auto& c : raw.clusters) std::sort(c.begin(), c.end());
  SeparatedResult out;
  out.clustering = split_to_scc_and_reorder(graph, raw);
  out.clustering.cut_edges = backward_edges(graph, out.clustering);
  out.marks = std::move(res.marks);
  out.regime_warning = ctx.degenerate || static_cast<double>(d) > separation_regime_limit(n, D);
  return out;
}

}  // namespace dldd

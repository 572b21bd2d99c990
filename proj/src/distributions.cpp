#include "dldd/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dldd {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      // One mixed 64-bit word; seed_seq was the dominant cost when recursions spawn many streams.
      engine_(mix64(mix64(seed) ^ (stream_id * 0x5851f42d4c957f2dULL + 0x14057b7ef767814fULL))) {}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(seed_, mix64(stream_id_ * 0x2545f4914f6cdd1dULL + mix64(child)));
}

double RngStream::uniform_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::uniform_closed_open() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: empty range");
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double TruncExpParams::epsilon() const {
  return std::exp(-rate * static_cast<double>(hi - lo) / 2.0);
}

void validate(const TruncExpParams& params) {
  if (!(params.rate > 0.0) || !std::isfinite(params.rate)) {
    throw std::invalid_argument("trunc_exp: rate must be positive and finite");
  }
  if (params.lo >= params.hi) throw std::invalid_argument("trunc_exp: need lo < hi");
}

std::int64_t sample_trunc_exp(const TruncExpParams& params, RngStream& rng) {
  validate(params);
  const double width = static_cast<double>(params.hi - params.lo);
  constexpr int kMaxTries = 1'000'000;
  for (int t = 0; t < kMaxTries; ++t) {
    const double offset = std::floor(-std::log(rng.uniform_open_closed()) / params.rate);
    if (offset < width) return params.lo + static_cast<std::int64_t>(offset);
  }
  throw std::logic_error("trunc_exp: rejection cap reached (rate " +
                         std::to_string(params.rate) + ")");
}

std::int64_t sample_trunc_exp_inverse(const TruncExpParams& params, RngStream& rng) {
  validate(params);
  // Continuous Exp(p) conditioned on [0, b - a), then floored.
  const double u = rng.uniform_closed_open();
  const double mass = -std::expm1(-params.rate * static_cast<double>(params.hi - params.lo));
  const double t = -std::log1p(-u * mass) / params.rate;
  auto x = params.lo + static_cast<std::int64_t>(std::floor(t));
  return std::min(x, params.hi - 1);
}

double trunc_exp_pmf(const TruncExpParams& params, std::int64_t x) {
  validate(params);
  if (x < params.lo || x >= params.hi) return 0.0;
  const double p = params.rate;
  const double num = std::exp(-p * static_cast<double>(x - params.lo)) * -std::expm1(-p);
  const double den = -std::expm1(-p * static_cast<double>(params.hi - params.lo));
  return num / den;
}

double trunc_exp_interval_mass(const TruncExpParams& params, std::int64_t x0, std::int64_t c) {
  validate(params);
  if (x0 < params.lo || c < 0 || x0 + c > params.hi) {
    throw std::invalid_argument("trunc_exp_interval_mass: interval outside support");
  }
  const double p = params.rate;
  const double eps = params.epsilon();
  return std::exp(-p * static_cast<double>(x0 - params.lo)) *
         -std::expm1(-p * static_cast<double>(c)) / (1.0 - eps * eps);
}

std::int64_t sample_uniform_int(std::int64_t lo_exclusive, std::int64_t hi_inclusive,
                                RngStream& rng) {
  if (lo_exclusive >= hi_inclusive) {
    throw std::invalid_argument("sample_uniform_int: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi_inclusive - lo_exclusive);
  return lo_exclusive + 1 + static_cast<std::int64_t>(rng.uniform_below(span));
}

bool sample_bernoulli(double prob, RngStream& rng) {
  if (std::isnan(prob) || prob < 0.0) {
    throw std::invalid_argument("sample_bernoulli: negative probability");
  }
  if (prob >= 1.0) return true;
  return rng.uniform_closed_open() < prob;
}

}  // namespace dldd

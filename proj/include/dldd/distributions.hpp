#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace dldd {

/// Seeded, reproducible random stream. Substreams are derived by mixing the parent
/// identity with a child index, so a recursion tree gets one stream per node.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream substream(std::uint64_t child) const;

  std::uint64_t next() { return engine_(); }
  /// Uniform double in (0, 1].
  double uniform_open_closed();
  /// Uniform double in [0, 1).
  double uniform_closed_open();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);

struct TruncExpParams {
  double rate = 1.0;     // p
  std::int64_t lo = 0;   // a, inclusive
  std::int64_t hi = 1;   // b, exclusive

  /// exp(-p (b - a) / 2)
  double epsilon() const;
};

/// Throws std::invalid_argument unless p > 0 (finite) and a < b.
void validate(const TruncExpParams& params);

/// Rejection sampler: draw a + floor(-ln(u) / p) until the value is below b.
/// Throws std::logic_error after 10^6 rejections.
std::int64_t sample_trunc_exp(const TruncExpParams& params, RngStream& rng);

/// Closed-form inverse-CDF sampler for the same law. Used as a cross-check.
std::int64_t sample_trunc_exp_inverse(const TruncExpParams& params, RngStream& rng);

double trunc_exp_pmf(const TruncExpParams& params, std::int64_t x);

/// Pr(x in [x0, x0 + c)) for a <= x0 < x0 + c <= b.
double trunc_exp_interval_mass(const TruncExpParams& params, std::int64_t x0, std::int64_t c);

/// Uniform on {lo_exclusive + 1, ..., hi_inclusive}.
std::int64_t sample_uniform_int(std::int64_t lo_exclusive, std::int64_t hi_inclusive,
                                RngStream& rng);

/// Probabilities above 1 are clamped; negative or NaN probabilities throw.
bool sample_bernoulli(double prob, RngStream& rng);

/// Fisher-Yates, in place.
template <class T>
void shuffle(std::span<T> items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace dldd

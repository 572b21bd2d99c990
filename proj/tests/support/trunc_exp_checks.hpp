#pragma once
// Goodness-of-fit checks for the truncated exponential sampler.

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dldd/distributions.hpp"

namespace checks {

struct GofResult {
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
  // Pooled successive ratio mass[a+1, b) / mass[a, b-1), which equals exp(-p) under the law.
  double ratio = 0.0;
  double ratio_expected = 0.0;
  double ratio_z = 0.0;  // on the log scale
};

inline GofResult trunc_exp_gof(const dldd::TruncExpParams& params, std::size_t draws,
                               std::uint64_t seed, bool use_inverse = false) {
  dldd::RngStream rng(seed, 77);
  const std::int64_t width = params.hi - params.lo;
  std::vector<double> counts(static_cast<std::size_t>(width), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto x = use_inverse ? dldd::sample_trunc_exp_inverse(params, rng)
                               : dldd::sample_trunc_exp(params, rng);
    counts[static_cast<std::size_t>(x - params.lo)] += 1.0;
  }
  const double n = static_cast<double>(draws);

  // Merge the tail into one bin until every bin expects at least 5 draws.
  GofResult out;
  double obs_acc = 0.0, exp_acc = 0.0;
  int bins = 0;
  for (std::int64_t i = 0; i < width; ++i) {
    obs_acc += counts[static_cast<std::size_t>(i)];
    exp_acc += n * dldd::trunc_exp_pmf(params, params.lo + i);
    const bool last = i + 1 == width;
    double rest = 0.0;
    if (!last) rest = n * dldd::trunc_exp_interval_mass(params, params.lo + i + 1, width - i - 1);
    if (exp_acc >= 5.0 && (last || rest >= 5.0)) {
      out.chi_square += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      ++bins;
      obs_acc = exp_acc = 0.0;
    } else if (last && exp_acc > 0.0) {
      out.chi_square += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      ++bins;
    }
  }
  out.dof = bins - 1;
  if (out.dof >= 1) {
    boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.chi_square));
  }

  if (width >= 2) {
    const double c1 = n - counts.front();
    const double c0 = n - counts.back();
    out.ratio = c1 / c0;
    out.ratio_expected = std::exp(-params.rate);
    const double q1 = c1 / n, q0 = c0 / n;
    const double var = (1 - q1) / (n * q1) + (1 - q0) / (n * q0) +
                       2 * (1 - q1) * (1 - q0) / (n * q1 * q0);
    out.ratio_z = var > 0 ? (std::log(out.ratio) + params.rate) / std::sqrt(var) : 0.0;
  }
  return out;
}

// Deterministic random configurations shared by tests and the acceptance binary.
inline std::vector<dldd::TruncExpParams> random_trunc_exp_configs(std::size_t count,
                                                                  std::uint64_t seed) {
  dldd::RngStream rng(seed, 4242);
  std::vector<dldd::TruncExpParams> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double p = std::exp(std::log(0.05) + rng.uniform_closed_open() * std::log(3.0 / 0.05));
    const auto a = static_cast<std::int64_t>(rng.uniform_below(51));
    const auto w = 2 + static_cast<std::int64_t>(rng.uniform_below(39));
    out.push_back({p, a, a + w});
  }
  return out;
}

}  // namespace checks

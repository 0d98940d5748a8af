#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

#include "gcs/keyed_rng.hpp"
#include "gcs/log_distribution.hpp"
#include "gcs/types.hpp"

namespace gcs {

// One standard-Gumbel draw in dual form: the variate itself and the log of
// the uniform beneath it, log_uniform = log Q^{-1}(value) = -exp(-value).
// Recycling arithmetic runs on log_uniform, where the update is a plain
// subtraction that neither saturates near 1 nor underflows near 0; value is
// what the perturbed argmax consumes.
struct GumbelNoise {
  double value = 0.0;
  double log_uniform = -1.0;

  static GumbelNoise from_uniform(double u) {
    const double log_u = std::log(u);
    return {-std::log(-log_u), log_u};
  }

  static GumbelNoise from_log_uniform(double log_u) {
    return {-std::log(-log_u), log_u};
  }
};

// Quantile Q(u) = -log(-log u) of G(0,1).
inline double gumbel_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("gumbel_quantile: u must lie in (0,1)");
  }
  return -std::log(-std::log(u));
}

// CDF Q^{-1}(g) = exp(-exp(-g)); total on the extended reals, with
// Q^{-1}(-inf) = 0 and Q^{-1}(+inf) = 1.
inline double gumbel_cdf(double g) { return std::exp(-std::exp(-g)); }

// Deterministic standard-Gumbel draw keyed by (seed, token, counter).
// log_uniform comes straight from the underlying uniform, never through a
// quantile/CDF round trip.
inline GumbelNoise keyed_standard_gumbel(std::uint64_t seed, std::int64_t token_index,
                                         std::int64_t counter) {
  if (token_index < 0 || counter < 0) {
    throw std::domain_error("keyed_standard_gumbel: negative token or counter");
  }
  return GumbelNoise::from_uniform(
      keyed::open_uniform(seed, static_cast<std::uint64_t>(token_index),
                          static_cast<std::uint64_t>(counter)));
}

// k = argmax_i(log p^i + g^i). Ties break to the lowest index; tokens with
// log-prob -inf can never win. Throws std::invalid_argument on a length
// mismatch or when no token is eligible.
inline Token perturbed_argmax(const LogDistribution& dist,
                              std::span<const GumbelNoise> noise) {
  if (static_cast<int>(noise.size()) != dist.size()) {
    throw std::invalid_argument("perturbed_argmax: noise length != vocab size");
  }
  Token best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Token i = 0; i < dist.size(); ++i) {
    const double lp = dist[i];
    if (lp == -std::numeric_limits<double>::infinity()) continue;
    const double score = lp + noise[static_cast<std::size_t>(i)].value;
    if (best < 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  if (best < 0) {
    throw std::invalid_argument("perturbed_argmax: all tokens have zero probability");
  }
  return best;
}

// The same selection through the exponential-races identity
// argmin_{i : p^i > 0} (-log u^i) / p^i; kept as an independent algebraic
// route for cross-checking perturbed_argmax.
inline Token perturbed_argmax_by_race(const LogDistribution& dist,
                                      std::span<const GumbelNoise> noise) {
  if (static_cast<int>(noise.size()) != dist.size()) {
    throw std::invalid_argument("perturbed_argmax_by_race: noise length != vocab size");
  }
  Token best = -1;
  double best_time = std::numeric_limits<double>::infinity();
  for (Token i = 0; i < dist.size(); ++i) {
    const double lp = dist[i];
    if (lp == -std::numeric_limits<double>::infinity()) continue;
    const double arrival = -noise[static_cast<std::size_t>(i)].log_uniform / std::exp(lp);
    if (best < 0 || arrival < best_time) {
      best = i;
      best_time = arrival;
    }
  }
  if (best < 0) {
    throw std::invalid_argument("perturbed_argmax_by_race: all tokens have zero probability");
  }
  return best;
}

}  // namespace gcs

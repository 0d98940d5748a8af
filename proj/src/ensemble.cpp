#include "gcs/ensemble.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gcs/errors.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/types.hpp"

namespace gcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_shapes(const std::vector<LogDistribution>& dists) {
  if (dists.empty()) {
    throw std::invalid_argument("ensemble: empty distribution list");
  }
  for (const auto& d : dists) {
    if (d.size() != dists.front().size()) {
      throw std::invalid_argument("ensemble: vocab size mismatch");
    }
  }
}

}  // namespace

LogDistribution geometric_ensemble(const std::vector<LogDistribution>& dists) {
  check_shapes(dists);
  const int vocab = dists.front().size();
  const double inv_n = 1.0 / static_cast<double>(dists.size());
  std::vector<double> mean_log(static_cast<std::size_t>(vocab), 0.0);
  bool any_finite = false;
  for (Token j = 0; j < vocab; ++j) {
    double acc = 0.0;
    for (const auto& d : dists) acc += d[j];
    const double scaled = acc * inv_n;
    mean_log[static_cast<std::size_t>(j)] = scaled;
    any_finite = any_finite || scaled != kNegInf;
  }
  if (!any_finite) {
    throw DegenerateEnsemble("geometric_ensemble: no token survives every input");
  }
  return normalized_from_logits(std::move(mean_log));
}

double average_forward_kl(const LogDistribution& q,
                          const std::vector<LogDistribution>& dists) {
  check_shapes(dists);
  if (q.size() != dists.front().size()) {
    throw std::invalid_argument("average_forward_kl: vocab size mismatch");
  }
  double total = 0.0;
  for (const auto& p : dists) {
    double kl = 0.0;
    for (Token j = 0; j < q.size(); ++j) {
      const double lq = q[j];
      if (lq == kNegInf) continue;
      kl += std::exp(lq) * (lq - p[j]);
    }
    total += kl;
  }
  return total / static_cast<double>(dists.size());
}

OptimalityProbeReport ensemble_optimality_probe(
    const std::vector<LogDistribution>& dists, int trials, double step,
    std::uint64_t seed) {
  if (trials < 1) throw std::domain_error("ensemble_optimality_probe: trials must be >= 1");
  if (!(step >= 0.0)) throw std::domain_error("ensemble_optimality_probe: step must be >= 0");

  const LogDistribution base = geometric_ensemble(dists);
  OptimalityProbeReport report;
  report.trials = trials;
  report.step = step;
  report.base_kl = average_forward_kl(base, dists);

  const int vocab = base.size();
  std::vector<Token> support;
  std::vector<double> base_probs(static_cast<std::size_t>(vocab), 0.0);
  for (Token j = 0; j < vocab; ++j) {
    if (base[j] != kNegInf) {
      support.push_back(j);
      base_probs[static_cast<std::size_t>(j)] = base.prob(j);
    }
  }

  for (int trial = 0; trial < trials; ++trial) {
    keyed::Stream rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<double> direction(support.size(), 0.0);
    double mean = 0.0;
    for (auto& d : direction) mean += d = rng.normal();
    mean /= static_cast<double>(direction.size());
    double norm = 0.0;
    for (auto& d : direction) {
      d -= mean;  // tangent to the simplex: coordinates sum to zero
      norm += d * d;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12 || step == 0.0) continue;  // no movement, delta exactly 0

    // Shrink the step where it would push a support coordinate to zero or
    // below; the perturbed point must stay a valid distribution.
    double scale = step / norm;
    for (std::size_t s = 0; s < support.size(); ++s) {
      const double p = base_probs[static_cast<std::size_t>(support[s])];
      if (direction[s] < 0.0) {
        scale = std::min(scale, 0.5 * p / -direction[s]);
      }
    }

    std::vector<double> perturbed = base_probs;
    double total = 0.0;
    for (std::size_t s = 0; s < support.size(); ++s) {
      total += perturbed[static_cast<std::size_t>(support[s])] += scale * direction[s];
    }
    for (const Token j : support) perturbed[static_cast<std::size_t>(j)] /= total;

    const double kl =
        average_forward_kl(LogDistribution::from_probs(perturbed), dists);
    const double delta = kl - report.base_kl;
    if (delta < -report.tolerance) ++report.violations;
    if (delta < report.worst_decrease) report.worst_decrease = delta;
  }
  return report;
}

}  // namespace gcs

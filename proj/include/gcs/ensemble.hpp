#pragma once

#include <cstdint>
#include <vector>

#include "gcs/log_distribution.hpp"

namespace gcs {

// Normalized geometric mean of the inputs, computed entirely in log space.
// A token with zero probability in any input has zero probability in the
// output; if that empties the support, DegenerateEnsemble is thrown.
LogDistribution geometric_ensemble(const std::vector<LogDistribution>& dists);

// (1/n) * sum_i KL(q || P_i), with 0*log(0/x) = 0. Returns +infinity when q
// places mass where some P_i has none.
double average_forward_kl(const LogDistribution& q,
                          const std::vector<LogDistribution>& dists);

struct OptimalityProbeReport {
  int trials = 0;
  double step = 0.0;
  double base_kl = 0.0;        // objective at the geometric ensemble
  double worst_decrease = 0.0;  // most negative delta observed, 0 if none
  int violations = 0;          // deltas below -tolerance
  double tolerance = 1e-9;
};

// Perturbs the geometric ensemble along random simplex-tangent directions of
// the given magnitude (restricted to its support) and reports how often the
// average forward KL decreased. A correct minimizer yields zero violations.
OptimalityProbeReport ensemble_optimality_probe(
    const std::vector<LogDistribution>& dists, int trials, double step,
    std::uint64_t seed);

}  // namespace gcs

#pragma once

#include <span>

#include "gcs/log_distribution.hpp"
#include "gcs/samplers.hpp"
#include "gcs/types.hpp"

namespace gcs::metrics {

// Intersection over union of the two responses' token sets, with the eos
// marker excluded. Two empty sets count as identical (1.0).
double jaccard(const Response& a, const Response& b, Token eos_token);

// 1.0 when the full token sequences are identical, else 0.0.
double exact_match(const Response& a, const Response& b);

// Fraction of aligned positions holding the same token, counting positions
// where only one response has a token as mismatches. Two empty responses
// match trivially (1.0).
double position_match_rate(const Response& a, const Response& b);

// Bias-corrected estimate of p^2 + (1-p)^2 from N >= 2 binary labels:
// N/(N-1) * (phat^2 + (1-phat)^2) - 1/(N-1). Deliberately not clamped.
double p_repeat_unbiased(std::span<const int> labels);

// Closed-form probability that category k wins the perturbed argmax under
// both p and q when the two draws share one Gumbel noise vector:
// 1 / (1 + sum_{i != k} max{p_i/p_k, q_i/q_k}). Zero when either side gives
// k zero probability.
double theorem1_joint(const LogDistribution& p, const LogDistribution& q,
                      Token k);

}  // namespace gcs::metrics

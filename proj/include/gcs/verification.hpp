#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcs/log_distribution.hpp"
#include "gcs/samplers.hpp"
#include "gcs/types.hpp"

namespace gcs {

// One statistical comparison: a Monte Carlo estimate against its reference,
// with the z-score and the threshold it was judged at. pass holds exactly
// when |z_score| <= threshold.
struct StatReport {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
  double z_score = 0.0;
  std::int64_t trials = 0;
  double threshold = 4.0;
  bool pass = false;
};

// Report for a proportion estimate judged with the binomial standard error
// sqrt(r * (1 - r) / trials) computed at the reference r.
StatReport binomial_report(std::string name, double estimate, double reference,
                           std::int64_t trials, double threshold);

// Draws `trials` shared noise vectors, takes the perturbed argmax under p
// and under q, and compares the per-category joint match frequency with the
// closed form. Requires trials >= 10^4.
std::vector<StatReport> mc_coupled_match(const LogDistribution& p,
                                         const LogDistribution& q,
                                         std::int64_t trials, std::uint64_t seed,
                                         double threshold = 4.0);

// Generates `trials` responses with fresh per-trial latent and rng seeds and
// compares the empirical conditional next-token distribution at every
// frequently visited prefix against the exact model conditional. A report is
// emitted per prefix with at least min_visits visits; estimate is the total
// variation distance, judged against tv_bound. Requires an enumerably small
// model (vocab <= 8, max_tokens <= 4) and trials >= 10^4.
std::vector<StatReport> marginal_tv_test(const SequenceModel& model,
                                         const SamplerConfig& config,
                                         std::span<const Token> prompt,
                                         std::int64_t trials,
                                         std::int64_t min_visits = 10000,
                                         double tv_bound = 0.005);

// Monte Carlo check that with X, Y, Z_n iid uniform, the events
// X * Y^(-A/B) < D and Z_n < Y^(C_n/B) intersect with probability B * D
// whenever A + B + sum(C) = 1. Requires trials >= 10^5.
StatReport lemma_b2_check(double A, double B, std::span<const double> C,
                          double D, std::int64_t trials, std::uint64_t seed,
                          double threshold = 4.0);

// Exact distribution over complete responses (eos-terminated or truncated at
// max_tokens), in lexicographic token order.
struct EnumeratedResponses {
  std::vector<std::pair<std::vector<Token>, double>> outcomes;
};

EnumeratedResponses enumerate_responses(const SequenceModel& model,
                                        std::span<const Token> prompt,
                                        double temperature, int max_tokens);

// Total variation distance between the empirical distribution of `trials`
// complete responses (fresh per-trial seeds) and the enumerated exact law.
StatReport response_tv_test(const SequenceModel& model,
                            const SamplerConfig& config,
                            std::span<const Token> prompt, std::int64_t trials,
                            double tv_bound = 0.005);

}  // namespace gcs

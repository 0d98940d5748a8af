#include "gcs/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gcs/ensemble.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/log_distribution.hpp"
#include "gcs/metrics.hpp"
#include "gcs/samplers.hpp"
#include "gcs/stats.hpp"
#include "gcs/toy_models.hpp"

namespace gcs {
namespace {

// A random point on the probability simplex (all categories supported).
LogDistribution random_distribution(std::uint64_t seed, int vocab) {
  keyed::Stream rng(seed, 0);
  std::vector<double> logits(static_cast<std::size_t>(vocab));
  for (double& l : logits) l = rng.log_gamma(1.0);
  return normalized_from_logits(std::move(logits));
}

void append_prefixed(std::vector<StatReport>& into, const std::string& prefix,
                     std::vector<StatReport> reports) {
  for (auto& r : reports) {
    r.name = prefix + "/" + r.name;
    into.push_back(std::move(r));
  }
}

// Four-symbol chain with a small eos probability so every short prefix is
// visited far above the reporting floor.
ChainModel verification_chain_model() {
  auto initial = LogDistribution::from_probs({0.10, 0.30, 0.30, 0.30});
  std::vector<LogDistribution> rows;
  rows.push_back(LogDistribution::from_probs({0.25, 0.25, 0.25, 0.25}));
  rows.push_back(LogDistribution::from_probs({0.10, 0.28, 0.32, 0.30}));
  rows.push_back(LogDistribution::from_probs({0.12, 0.30, 0.28, 0.30}));
  rows.push_back(LogDistribution::from_probs({0.10, 0.32, 0.30, 0.28}));
  return ChainModel(std::move(initial), std::move(rows));
}

}  // namespace

std::vector<StatReport> coupled_match_suite(std::int64_t trials,
                                            std::uint64_t seed) {
  constexpr double kThreshold = 5.0;
  std::vector<StatReport> checks;
  const auto worked_p = LogDistribution::from_probs({0.7, 0.3});
  const auto worked_q = LogDistribution::from_probs({0.4, 0.6});
  append_prefixed(checks, "worked",
                  mc_coupled_match(worked_p, worked_q, trials,
                                   keyed::derive(seed, 0), kThreshold));
  constexpr int kVocabCycle[] = {2, 4, 8};
  for (int pair = 0; pair < 20; ++pair) {
    const int vocab = kVocabCycle[pair % 3];
    const auto p = random_distribution(keyed::derive(seed, 100 + pair), vocab);
    const auto q = random_distribution(keyed::derive(seed, 200 + pair), vocab);
    append_prefixed(checks, "pair_" + std::to_string(pair),
                    mc_coupled_match(p, q, trials, keyed::derive(seed, 300 + pair),
                                     kThreshold));
  }
  return checks;
}

std::vector<StatReport> marginal_preservation_suite(std::int64_t trials,
                                                    std::uint64_t seed) {
  const ChainModel model = verification_chain_model();
  SamplerConfig config;
  config.kind = SamplerKind::GCSwR;
  config.temperature = 1.0;
  config.latent_seed = seed;
  config.rng_seed = keyed::derive(seed, 1);
  config.max_tokens = 3;
  const std::vector<Token> prompt;
  return marginal_tv_test(model, config, prompt, trials);
}

std::vector<StatReport> product_intersection_suite(std::int64_t trials,
                                                   std::uint64_t seed) {
  constexpr double kThreshold = 5.0;
  std::vector<StatReport> checks;
  for (int set = 0; set < 10; ++set) {
    keyed::Stream rng(keyed::derive(seed, 400 + set), 0);
    const int c_count = 1 + set % 3;
    std::vector<double> weights(static_cast<std::size_t>(2 + c_count));
    double total = 0.0;
    for (double& w : weights) {
      w = std::exp(rng.log_gamma(1.0));
      total += w;
    }
    for (double& w : weights) w /= total;
    const double a = weights[0];
    const double b = weights[1];
    const std::vector<double> c(weights.begin() + 2, weights.end());
    const double d = rng.uniform();
    StatReport report = lemma_b2_check(a, b, c, d, trials,
                                       keyed::derive(seed, 500 + set), kThreshold);
    report.name = "set_" + std::to_string(set) + "/" + report.name;
    checks.push_back(std::move(report));
  }
  return checks;
}

std::vector<StatReport> ensemble_suite(std::int64_t trials, std::uint64_t seed) {
  std::vector<StatReport> checks;

  const auto combined = geometric_ensemble({LogDistribution::from_probs({0.5, 0.5}),
                                            LogDistribution::from_probs({0.8, 0.2})});
  const double worst_gap = std::max(std::abs(combined.prob(0) - 2.0 / 3.0),
                                    std::abs(combined.prob(1) - 1.0 / 3.0));
  StatReport closed;
  closed.name = "closed_form";
  closed.estimate = worst_gap;
  closed.reference = 0.0;
  closed.trials = 1;
  closed.threshold = 1e-12;
  closed.z_score = 0.0;
  closed.pass = worst_gap <= 1e-12;
  checks.push_back(std::move(closed));

  for (int set = 0; set < 20; ++set) {
    keyed::Stream meta(keyed::derive(seed, 600 + set), 0);
    const int vocab = 2 + static_cast<int>(meta.uniform() * 7.0);
    const int count = 2 + static_cast<int>(meta.uniform() * 4.0);
    std::vector<LogDistribution> dists;
    dists.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      dists.push_back(
          random_distribution(keyed::derive(seed, 700 + 16 * set + i), vocab));
    }
    const int probe_trials = static_cast<int>(
        std::min<std::int64_t>(trials, std::numeric_limits<int>::max()));
    const auto probe = ensemble_optimality_probe(dists, probe_trials, 1e-3,
                                                 keyed::derive(seed, 800 + set));
    StatReport report;
    report.name = "probe_set_" + std::to_string(set);
    report.estimate = std::abs(probe.worst_decrease);  // worst KL decrease seen
    report.reference = 0.0;
    report.std_error = 0.0;
    report.trials = probe.trials;
    report.threshold = probe.tolerance;
    report.z_score = 0.0;
    report.pass = probe.violations == 0;
    checks.push_back(std::move(report));
  }
  return checks;
}

std::vector<StatReport> estimator_suite(std::int64_t trials, std::uint64_t seed) {
  constexpr double kThreshold = 3.0;
  constexpr double kProbs[] = {0.1, 0.3, 0.5};
  constexpr int kSizes[] = {2, 5, 20};
  std::vector<StatReport> checks;
  int point = 0;
  for (const double p : kProbs) {
    for (const int n : kSizes) {
      keyed::Stream rng(keyed::derive(seed, 900 + point), 0);
      stats::RunningMean estimates;
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (std::int64_t rep = 0; rep < trials; ++rep) {
        for (int& label : labels) label = rng.uniform() < p ? 1 : 0;
        estimates.add(metrics::p_repeat_unbiased(labels));
      }
      const double target = p * p + (1.0 - p) * (1.0 - p);
      StatReport report;
      report.name = "p=" + std::to_string(p).substr(0, 3) + ",N=" + std::to_string(n);
      report.estimate = estimates.mean();
      report.reference = target;
      report.std_error = estimates.std_error();
      report.z_score = (estimates.mean() - target) / estimates.std_error();
      report.trials = trials;
      report.threshold = kThreshold;
      report.pass = std::abs(report.z_score) <= kThreshold;
      checks.push_back(std::move(report));
      ++point;
    }
  }
  return checks;
}

}  // namespace gcs

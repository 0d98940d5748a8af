#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gcs/ensemble.hpp"
#include "gcs/experiment.hpp"
#include "gcs/gumbel.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/log_distribution.hpp"
#include "gcs/metrics.hpp"
#include "gcs/noise_store.hpp"
#include "gcs/samplers.hpp"
#include "gcs/suites.hpp"
#include "gcs/toy_models.hpp"

// Release gate: each criterion prints exactly one PASS/FAIL line with its
// pinned tolerances and the measured margins. The process exits nonzero if
// any criterion fails.

namespace {

constexpr std::uint64_t kSeed = 2026;
constexpr std::int64_t kMillion = 1000000;

constexpr double kWorkedJointTol = 1e-12;   // closed-form joint, two categories
constexpr double kGapSigmas = 3.0;          // experiment effect-size gates
constexpr double kPoolingExactTol = 1e-15;  // two-distribution pooling identity
constexpr double kRouteAgreementTol = 1e-9; // renewal route cross-check
constexpr double kSelectionBudgetSeconds = 60.0;
constexpr double kMarginalBudgetSeconds = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SuiteSummary {
  int checks = 0;
  double worst_z = 0.0;
  bool all_pass = true;
};

SuiteSummary summarize(const std::vector<gcs::StatReport>& reports) {
  SuiteSummary summary;
  summary.checks = static_cast<int>(reports.size());
  for (const auto& r : reports) {
    summary.worst_z = std::max(summary.worst_z, std::abs(r.z_score));
    summary.all_pass = summary.all_pass && r.pass;
  }
  return summary;
}

std::string fixed(double x, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << x;
  return out.str();
}

std::string sci(double x) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(1) << x;
  return out.str();
}

std::vector<gcs::Token> ancestral_prompt(const gcs::NgramModel& base,
                                         std::uint64_t rng_seed) {
  gcs::SamplerConfig sampler;
  sampler.kind = gcs::SamplerKind::IS;
  sampler.max_tokens = 2;
  sampler.rng_seed = rng_seed;
  const std::vector<gcs::Token> empty;
  gcs::Response drawn = gcs::generate(base, empty, sampler);
  if (drawn.finished) drawn.tokens.pop_back();
  return drawn.tokens;
}

gcs::NgramModel trained_base() {
  return gcs::train_ngram(gcs::load_corpus_text(gcs::builtin_corpus_text()), 3,
                          0.1);
}

// 1. Shared-noise selection agreement with the closed form: the worked
// two-category joint plus 20 random pairs at one million trials each.
Outcome criterion1() {
  const auto start = Clock::now();
  const auto p = gcs::LogDistribution::from_probs({0.7, 0.3});
  const auto q = gcs::LogDistribution::from_probs({0.4, 0.6});
  const bool worked_exact =
      std::abs(gcs::metrics::theorem1_joint(p, q, 0) - 0.4) <= kWorkedJointTol &&
      std::abs(gcs::metrics::theorem1_joint(p, q, 1) - 0.3) <= kWorkedJointTol;

  const auto summary = summarize(gcs::coupled_match_suite(kMillion, kSeed));
  const double elapsed = seconds_since(start);

  Outcome outcome;
  outcome.pass = worked_exact && summary.all_pass &&
                 elapsed <= kSelectionBudgetSeconds;
  outcome.detail = std::to_string(summary.checks) + " checks, max |z| " +
                   fixed(summary.worst_z, 2) + " (bound 5), worked joint " +
                   (worked_exact ? "exact" : "WRONG") + ", " +
                   fixed(elapsed, 1) + "s (budget 60s)";
  return outcome;
}

// 2. Marginal preservation under recycling: per-prefix conditional TV on the
// enumerable four-symbol chain at one million fresh-latent sequences.
Outcome criterion2() {
  const auto start = Clock::now();
  const auto reports = gcs::marginal_preservation_suite(kMillion, kSeed);
  const double elapsed = seconds_since(start);

  double worst_tv = 0.0;
  bool all_pass = !reports.empty();
  for (const auto& r : reports) {
    worst_tv = std::max(worst_tv, r.estimate);
    all_pass = all_pass && r.pass;
  }

  Outcome outcome;
  outcome.pass = all_pass && reports.size() == 13 &&
                 elapsed <= kMarginalBudgetSeconds;
  outcome.detail = std::to_string(reports.size()) +
                   " prefixes above the visit floor, worst TV " +
                   fixed(worst_tv, 4) + " (bound 0.005), " + fixed(elapsed, 1) +
                   "s (budget 300s)";
  return outcome;
}

// 3. Product-form intersection probabilities on 10 random constant sets.
Outcome criterion3() {
  const auto start = Clock::now();
  const auto summary = summarize(gcs::product_intersection_suite(kMillion, kSeed));
  Outcome outcome;
  outcome.pass = summary.all_pass && summary.checks == 10;
  outcome.detail = std::to_string(summary.checks) + " sets, max |z| " +
                   fixed(summary.worst_z, 2) + " (bound 5), " +
                   fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// 4. Consistency ordering at unit temperature with distribution gap 0.5:
// recycling beats plain coupling beats independent sampling, each gap more
// than three combined standard errors, and pooling lifts every sampler.
Outcome criterion4() {
  const auto start = Clock::now();
  gcs::ExperimentConfig config;
  config.ensembling = true;
  const auto rows = gcs::run_experiment(config);
  if (rows.size() != 6) return {false, "expected 6 rows, got " +
                                           std::to_string(rows.size())};

  const auto& is_plain = rows[0];
  const auto& gcs_plain = rows[2];
  const auto& wr_plain = rows[4];
  const auto gap_z = [](const gcs::ExperimentRow& lo, const gcs::ExperimentRow& hi) {
    return (hi.jaccard_mean - lo.jaccard_mean) /
           std::hypot(lo.jaccard_stderr, hi.jaccard_stderr);
  };
  const double z_gcs_over_is = gap_z(is_plain, gcs_plain);
  const double z_wr_over_gcs = gap_z(gcs_plain, wr_plain);

  bool pooling_lifts = true;
  std::string lifts;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const double delta = rows[i + 1].jaccard_mean - rows[i].jaccard_mean;
    pooling_lifts = pooling_lifts && delta > 0.0;
    lifts += (i == 0 ? "+" : "/+") + fixed(delta, 3);
  }

  Outcome outcome;
  outcome.pass = z_gcs_over_is > kGapSigmas && z_wr_over_gcs > kGapSigmas &&
                 pooling_lifts;
  outcome.detail = "jaccard " + fixed(is_plain.jaccard_mean, 4) + " < " +
                   fixed(gcs_plain.jaccard_mean, 4) + " < " +
                   fixed(wr_plain.jaccard_mean, 4) + ", gaps " +
                   fixed(z_gcs_over_is, 1) + " and " + fixed(z_wr_over_gcs, 1) +
                   " SE (need > 3), pooling lift " + lifts + ", " +
                   fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// 5. Temperature sweep: recycling never falls below independent sampling,
// separates by more than three combined standard errors from T = 0.4 up,
// and at T = 0 every sampler emits identical outputs.
Outcome criterion5() {
  const auto start = Clock::now();
  gcs::ExperimentConfig config;
  config.kinds = {gcs::SamplerKind::IS, gcs::SamplerKind::GCSwR};
  config.temperatures = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4};
  config.pairs = 3000;
  const auto rows = gcs::run_experiment(config);
  const std::size_t temps = config.temperatures.size();
  if (rows.size() != 2 * temps) {
    return {false, "expected 14 rows, got " + std::to_string(rows.size())};
  }

  bool never_below = true;
  bool separated = true;
  double min_gap = std::numeric_limits<double>::infinity();
  double min_z_warm = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < temps; ++t) {
    const auto& is_row = rows[t];
    const auto& wr_row = rows[temps + t];
    const double gap = wr_row.jaccard_mean - is_row.jaccard_mean;
    never_below = never_below && gap >= 0.0;
    min_gap = std::min(min_gap, gap);
    if (config.temperatures[t] >= 0.4) {
      const double z = gap / std::hypot(is_row.jaccard_stderr, wr_row.jaccard_stderr);
      separated = separated && z > kGapSigmas;
      min_z_warm = std::min(min_z_warm, z);
    }
  }

  const auto base = trained_base();
  const std::uint64_t prompt_ns = gcs::keyed::derive(kSeed, 70);
  const std::uint64_t latent_ns = gcs::keyed::derive(kSeed, 71);
  int identical = 0;
  constexpr int kPrompts = 20;
  for (int j = 0; j < kPrompts; ++j) {
    const auto prompt =
        ancestral_prompt(base, gcs::keyed::derive(prompt_ns, static_cast<std::uint64_t>(j)));
    gcs::SamplerConfig frozen;
    frozen.temperature = 0.0;
    frozen.max_tokens = 32;
    frozen.latent_seed = gcs::keyed::derive(latent_ns, static_cast<std::uint64_t>(j));
    frozen.rng_seed = gcs::keyed::derive(latent_ns, static_cast<std::uint64_t>(j) + 1000);
    frozen.kind = gcs::SamplerKind::IS;
    const auto a = gcs::generate(base, prompt, frozen);
    frozen.kind = gcs::SamplerKind::GCS;
    const auto b = gcs::generate(base, prompt, frozen);
    frozen.kind = gcs::SamplerKind::GCSwR;
    const auto c = gcs::generate(base, prompt, frozen);
    identical += (a == b && a == c) ? 1 : 0;
  }

  Outcome outcome;
  outcome.pass = never_below && separated && identical == kPrompts;
  outcome.detail = "gap >= 0 at all 7 temperatures (min " + sci(min_gap) +
                   "), min z " + fixed(min_z_warm, 1) +
                   " at T >= 0.4 (need > 3), T=0 identical on " +
                   std::to_string(identical) + "/" + std::to_string(kPrompts) +
                   " prompts, " + fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// 6. Geometric pooling: the two-distribution closed form is exact to double
// precision and random tangent probes never lower the pooled objective.
Outcome criterion6() {
  const auto start = Clock::now();
  const auto combined =
      gcs::geometric_ensemble({gcs::LogDistribution::from_probs({0.5, 0.5}),
                               gcs::LogDistribution::from_probs({0.8, 0.2})});
  const double worst_gap = std::max(std::abs(combined.prob(0) - 2.0 / 3.0),
                                    std::abs(combined.prob(1) - 1.0 / 3.0));

  const auto reports = gcs::ensemble_suite(1000, kSeed);
  bool probes_pass = reports.size() == 21;
  for (const auto& r : reports) probes_pass = probes_pass && r.pass;

  Outcome outcome;
  outcome.pass = worst_gap <= kPoolingExactTol && probes_pass;
  outcome.detail = "closed-form gap " + sci(worst_gap) + " (tol 1e-15), " +
                   "20 sets x 1000 probes with zero objective decreases "
                   "(tol 1e-9), " +
                   fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// 7. Repeat-probability estimator unbiasedness over the p x N grid.
Outcome criterion7() {
  const auto start = Clock::now();
  const auto summary = summarize(gcs::estimator_suite(100000, kSeed));
  Outcome outcome;
  outcome.pass = summary.all_pass && summary.checks == 9;
  outcome.detail = std::to_string(summary.checks) + " grid points, max |z| " +
                   fixed(summary.worst_z, 2) + " (bound 3), " +
                   fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// 8. Reproducibility: identical seeds give byte-identical responses, and an
// identical config gives byte-identical report files in both formats.
Outcome criterion8() {
  const auto start = Clock::now();
  const auto base_a = trained_base();
  const auto base_b = trained_base();
  const auto prompt = ancestral_prompt(base_a, gcs::keyed::derive(kSeed, 80));

  bool responses_stable = true;
  for (const auto kind : {gcs::SamplerKind::GCS, gcs::SamplerKind::GCSwR}) {
    gcs::SamplerConfig sampler;
    sampler.kind = kind;
    sampler.latent_seed = 777;
    sampler.max_tokens = 32;
    const auto first = gcs::generate(base_a, prompt, sampler);
    const auto second = gcs::generate(base_b, prompt, sampler);
    responses_stable = responses_stable && first == second &&
                       first == gcs::generate(base_a, prompt, sampler);
  }

  gcs::ExperimentConfig config;
  config.pairs = 40;
  config.max_tokens = 16;
  config.runs = 2;
  config.seed = 424242;
  const auto rows_a = gcs::run_experiment(config);
  const auto rows_b = gcs::run_experiment(config);
  bool reports_stable = true;
  for (const auto format : {gcs::ReportFormat::Csv, gcs::ReportFormat::Jsonl}) {
    std::ostringstream first;
    std::ostringstream second;
    gcs::write_rows(rows_a, format, first);
    gcs::write_rows(rows_b, format, second);
    reports_stable = reports_stable && first.str() == second.str() &&
                     !first.str().empty();
  }

  Outcome outcome;
  outcome.pass = responses_stable && reports_stable;
  outcome.detail = std::string("responses ") +
                   (responses_stable ? "stable" : "UNSTABLE") +
                   ", csv and jsonl reports " +
                   (reports_stable ? "byte-identical" : "DIFFER") + ", " +
                   fixed(seconds_since(start), 1) + "s";
  return outcome;
}

// Literal quantile-ratio renewal, kept as an independent algebraic route
// against the production log-uniform subtraction.
double renew_by_quantile_ratio(double g_i, double g_k, double lp_k, double lp_i) {
  const double u_i = gcs::gumbel_cdf(g_i);
  const double denom = gcs::gumbel_cdf(g_k + lp_k - lp_i);
  return gcs::gumbel_quantile(u_i / denom);
}

// 9. Renewal arithmetic: the production route agrees with the literal
// quantile-ratio route on ten thousand random steps, and a thousand chained
// renewals of a never-selected rare token stay finite.
Outcome criterion9() {
  const auto start = Clock::now();
  gcs::keyed::Stream meta(gcs::keyed::derive(kSeed, 90), 0);
  const std::uint64_t store_ns = gcs::keyed::derive(kSeed, 91);
  int checked = 0;
  double worst_dev = 0.0;
  for (int rep = 0; checked < 10000 && rep < 100000; ++rep) {
    const int vocab = 3 + static_cast<int>(meta.uniform() * 4.0);
    std::vector<double> probs(static_cast<std::size_t>(vocab));
    double total = 0.0;
    for (auto& p : probs) total += p = 0.05 + meta.uniform();
    for (auto& p : probs) p /= total;
    const auto dist = gcs::LogDistribution::from_probs(probs);

    const gcs::NoiseStore store(
        gcs::keyed::derive(store_ns, static_cast<std::uint64_t>(rep)), vocab);
    auto state = gcs::init_state(store);
    const auto before = state.current;
    const gcs::Token k = gcs::perturbed_argmax(dist, state.current);
    gcs::recycle(state, store, k, dist);

    for (int i = 0; i < vocab; ++i) {
      if (i == k) continue;
      const auto idx = static_cast<std::size_t>(i);
      const double u_i = gcs::gumbel_cdf(before[idx].value);
      const double denom = gcs::gumbel_cdf(
          before[static_cast<std::size_t>(k)].value + dist[k] - dist[i]);
      const double u_new = u_i / denom;
      if (u_i < 1e-300 || denom < 1e-300 || u_new >= 1.0 - 1e-6) continue;
      const double literal = renew_by_quantile_ratio(
          before[idx].value, before[static_cast<std::size_t>(k)].value, dist[k],
          dist[i]);
      const double dev = std::abs(state.current[idx].value - literal) /
                         std::max(1.0, std::abs(literal));
      worst_dev = std::max(worst_dev, dev);
      ++checked;
    }
  }
  const bool routes_agree = checked >= 10000 && worst_dev <= kRouteAgreementTol;

  const auto rare_dist = gcs::LogDistribution::from_probs({0.9989, 0.001, 0.0001});
  const gcs::NoiseStore rare_store(gcs::keyed::derive(kSeed, 92), 3);
  auto state = gcs::init_state(rare_store);
  constexpr gcs::Token kRare = 2;
  int rare_wins = 0;
  bool all_finite = true;
  for (int step = 0; step < 1000; ++step) {
    const gcs::Token k = gcs::perturbed_argmax(rare_dist, state.current);
    rare_wins += k == kRare ? 1 : 0;
    gcs::recycle(state, rare_store, k, rare_dist);
    for (const auto& lane : state.current) {
      all_finite = all_finite && std::isfinite(lane.value) &&
                   std::isfinite(lane.log_uniform) && lane.log_uniform < 0.0;
    }
  }
  const bool chain_ok = rare_wins == 0 && all_finite;

  Outcome outcome;
  outcome.pass = routes_agree && chain_ok;
  outcome.detail = std::to_string(checked) + " renewals, worst route gap " +
                   sci(worst_dev) + " (tol 1e-9); 1000 chained renewals of an " +
                   (rare_wins == 0 ? "unselected" : "UNEXPECTEDLY SELECTED") +
                   " rare token all finite: " + (all_finite ? "yes" : "no") +
                   ", " + fixed(seconds_since(start), 1) + "s";
  return outcome;
}

}  // namespace

int main() {
  const struct {
    int number;
    const char* label;
    Outcome (*run)();
  } criteria[] = {
      {1, "coupled selection matches the closed-form joint", criterion1},
      {2, "recycling preserves per-prefix conditional marginals", criterion2},
      {3, "uniform-power intersections match the product form", criterion3},
      {4, "consistency ordering and pooling lift at unit temperature", criterion4},
      {5, "recycling dominates independent sampling across temperatures", criterion5},
      {6, "geometric pooling is exact and probe-optimal", criterion6},
      {7, "repeat-probability estimator is unbiased", criterion7},
      {8, "responses and reports are byte-stable across reruns", criterion8},
      {9, "renewal routes agree and chained renewals stay finite", criterion9},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const Outcome outcome = criterion.run();
    std::cout << "criterion " << criterion.number << ": "
              << (outcome.pass ? "PASS" : "FAIL") << "  " << criterion.label
              << "  [" << outcome.detail << "]" << std::endl;
    failures += outcome.pass ? 0 : 1;
  }
  if (failures == 0) {
    std::cout << "all 9 criteria passed" << std::endl;
  } else {
    std::cout << failures << " criteria failed" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

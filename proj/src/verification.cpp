#include "gcs/verification.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gcs/errors.hpp"
#include "gcs/gumbel.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/metrics.hpp"

namespace gcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_prefix(std::span<const Token> prefix) {
  std::ostringstream out;
  out << "prefix=[";
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i > 0) out << ' ';
    out << prefix[i];
  }
  out << ']';
  return out.str();
}

// Shapes a total-variation comparison as a StatReport: the bound plays the
// role of the standard error, so |z| <= 1 exactly when the distance is
// within the bound.
StatReport tv_report(std::string name, double tv, std::int64_t trials,
                     double tv_bound) {
  StatReport report;
  report.name = std::move(name);
  report.estimate = tv;
  report.std_error = tv_bound;
  report.reference = 0.0;
  report.z_score = tv / tv_bound;
  report.trials = trials;
  report.threshold = 1.0;
  report.pass = tv < tv_bound;
  return report;
}

void require_enumerable(const SequenceModel& model, int max_tokens) {
  if (model.vocab_size() > 8 || max_tokens > 4) {
    throw EnumerationError(
        "marginal check needs vocab_size <= 8 and max_tokens <= 4");
  }
}

SamplerConfig trial_config(const SamplerConfig& base, std::int64_t trial) {
  SamplerConfig config = base;
  config.latent_seed = keyed::derive(base.latent_seed, static_cast<std::uint64_t>(trial));
  config.rng_seed = keyed::derive(base.rng_seed, static_cast<std::uint64_t>(trial));
  return config;
}

}  // namespace

StatReport binomial_report(std::string name, double estimate, double reference,
                           std::int64_t trials, double threshold) {
  StatReport report;
  report.name = std::move(name);
  report.estimate = estimate;
  report.reference = reference;
  report.trials = trials;
  report.threshold = threshold;
  report.std_error =
      std::sqrt(reference * (1.0 - reference) / static_cast<double>(trials));
  if (report.std_error == 0.0) {
    report.z_score = estimate == reference ? 0.0 : kInf;
  } else {
    report.z_score = (estimate - reference) / report.std_error;
  }
  report.pass = std::abs(report.z_score) <= threshold;
  return report;
}

std::vector<StatReport> mc_coupled_match(const LogDistribution& p,
                                         const LogDistribution& q,
                                         std::int64_t trials, std::uint64_t seed,
                                         double threshold) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("mc_coupled_match: vocab size mismatch");
  }
  if (trials < 10000) {
    throw std::domain_error("mc_coupled_match: trials must be >= 10^4");
  }
  const int vocab = p.size();
  std::vector<std::int64_t> matches(static_cast<std::size_t>(vocab), 0);
  std::vector<GumbelNoise> noise(static_cast<std::size_t>(vocab));
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    for (Token i = 0; i < vocab; ++i) {
      noise[static_cast<std::size_t>(i)] =
          keyed_standard_gumbel(seed, i, trial);
    }
    const Token y = perturbed_argmax(p, noise);
    const Token v = perturbed_argmax(q, noise);
    if (y == v) ++matches[static_cast<std::size_t>(y)];
  }
  std::vector<StatReport> reports;
  reports.reserve(static_cast<std::size_t>(vocab));
  for (Token k = 0; k < vocab; ++k) {
    const double estimate =
        static_cast<double>(matches[static_cast<std::size_t>(k)]) /
        static_cast<double>(trials);
    std::ostringstream name;
    name << "k=" << k;
    reports.push_back(binomial_report(name.str(), estimate,
                                      metrics::theorem1_joint(p, q, k), trials,
                                      threshold));
  }
  return reports;
}

std::vector<StatReport> marginal_tv_test(const SequenceModel& model,
                                         const SamplerConfig& config,
                                         std::span<const Token> prompt,
                                         std::int64_t trials,
                                         std::int64_t min_visits,
                                         double tv_bound) {
  require_enumerable(model, config.max_tokens);
  if (trials < 10000) {
    throw std::domain_error("marginal_tv_test: trials must be >= 10^4");
  }
  const std::size_t vocab = static_cast<std::size_t>(model.vocab_size());
  std::map<std::vector<Token>, std::vector<std::int64_t>> successor_counts;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const Response response =
        generate(model, prompt, trial_config(config, trial));
    std::vector<Token> prefix;
    prefix.reserve(response.tokens.size());
    for (const Token next : response.tokens) {
      auto it = successor_counts
                    .try_emplace(prefix, std::vector<std::int64_t>(vocab, 0))
                    .first;
      ++it->second[static_cast<std::size_t>(next)];
      prefix.push_back(next);
    }
  }

  std::vector<StatReport> reports;
  for (const auto& [prefix, counts] : successor_counts) {
    std::int64_t visits = 0;
    for (const auto c : counts) visits += c;
    if (visits < min_visits) continue;
    const LogDistribution exact =
        apply_temperature(model.next(prompt, prefix), config.temperature);
    double tv = 0.0;
    for (std::size_t j = 0; j < vocab; ++j) {
      const double empirical =
          static_cast<double>(counts[j]) / static_cast<double>(visits);
      tv += std::abs(empirical - exact.prob(static_cast<Token>(j)));
    }
    reports.push_back(tv_report(format_prefix(prefix), 0.5 * tv, visits, tv_bound));
  }
  return reports;
}

StatReport lemma_b2_check(double A, double B, std::span<const double> C,
                          double D, std::int64_t trials, std::uint64_t seed,
                          double threshold) {
  const auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  double c_sum = 0.0;
  for (const double c : C) {
    if (!in_unit(c)) {
      throw std::domain_error("lemma_b2_check: every C_n must lie in (0,1)");
    }
    c_sum += c;
  }
  if (!in_unit(A) || !in_unit(B) || !in_unit(D)) {
    throw std::domain_error("lemma_b2_check: A, B, D must lie in (0,1)");
  }
  if (std::abs(A + B + c_sum - 1.0) > 1e-9) {
    throw std::domain_error("lemma_b2_check: A + B + sum(C) must equal 1");
  }
  if (trials < 100000) {
    throw std::domain_error("lemma_b2_check: trials must be >= 10^5");
  }

  const double log_d = std::log(D);
  keyed::Stream rng(seed, 0);
  std::int64_t hits = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const double log_x = std::log(rng.uniform());
    const double log_y = std::log(rng.uniform());
    bool hit = log_x - (A / B) * log_y < log_d;
    for (const double c : C) {
      const double log_z = std::log(rng.uniform());
      hit = hit && log_z < (c / B) * log_y;
    }
    hits += hit ? 1 : 0;
  }
  const double estimate =
      static_cast<double>(hits) / static_cast<double>(trials);
  return binomial_report("event_intersection", estimate, B * D, trials,
                         threshold);
}

namespace {

void enumerate_into(const SequenceModel& model, std::span<const Token> prompt,
                    double temperature, int max_tokens,
                    std::vector<Token>& prefix, double prob,
                    EnumeratedResponses& out) {
  if (static_cast<int>(prefix.size()) == max_tokens) {
    out.outcomes.emplace_back(prefix, prob);
    return;
  }
  const LogDistribution dist =
      apply_temperature(model.next(prompt, prefix), temperature);
  for (Token j = 0; j < dist.size(); ++j) {
    const double p = dist.prob(j);
    if (p == 0.0 && dist[j] == -kInf) continue;
    prefix.push_back(j);
    if (j == model.eos_token()) {
      out.outcomes.emplace_back(prefix, prob * p);
    } else {
      enumerate_into(model, prompt, temperature, max_tokens, prefix, prob * p,
                     out);
    }
    prefix.pop_back();
  }
}

}  // namespace

EnumeratedResponses enumerate_responses(const SequenceModel& model,
                                        std::span<const Token> prompt,
                                        double temperature, int max_tokens) {
  if (max_tokens < 1) {
    throw std::domain_error("enumerate_responses: max_tokens must be >= 1");
  }
  double leaves = 1.0;
  for (int t = 0; t < max_tokens; ++t) leaves *= model.vocab_size();
  if (leaves > 2e5) {
    throw EnumerationError("enumerate_responses: state space too large");
  }
  EnumeratedResponses out;
  std::vector<Token> prefix;
  enumerate_into(model, prompt, temperature, max_tokens, prefix, 1.0, out);
  return out;
}

StatReport response_tv_test(const SequenceModel& model,
                            const SamplerConfig& config,
                            std::span<const Token> prompt, std::int64_t trials,
                            double tv_bound) {
  require_enumerable(model, config.max_tokens);
  if (trials < 10000) {
    throw std::domain_error("response_tv_test: trials must be >= 10^4");
  }
  const EnumeratedResponses exact =
      enumerate_responses(model, prompt, config.temperature, config.max_tokens);
  std::map<std::vector<Token>, std::int64_t> counts;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    counts[generate(model, prompt, trial_config(config, trial)).tokens] += 1;
  }
  double tv = 0.0;
  for (const auto& [tokens, prob] : exact.outcomes) {
    const auto it = counts.find(tokens);
    const double empirical =
        it == counts.end()
            ? 0.0
            : static_cast<double>(it->second) / static_cast<double>(trials);
    tv += std::abs(empirical - prob);
    if (it != counts.end()) counts.erase(it);
  }
  for (const auto& [tokens, count] : counts) {
    tv += static_cast<double>(count) / static_cast<double>(trials);
  }
  return tv_report("response_distribution", 0.5 * tv, trials, tv_bound);
}

}  // namespace gcs

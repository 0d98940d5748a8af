#include "gcs/log_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gcs {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> xs) {
  double max = kNegInf;
  for (double x : xs) max = std::max(max, x);
  if (!std::isfinite(max)) return max;  // empty, all -inf, or a +-inf/nan input
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - max);
  return max + std::log(sum);
}

LogDistribution::LogDistribution(std::vector<double> log_probs)
    : log_probs_(std::move(log_probs)) {
  validate();
}

LogDistribution LogDistribution::from_probs(std::span<const double> probs) {
  std::vector<double> lp(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) {
      throw std::invalid_argument("LogDistribution: negative probability");
    }
    lp[i] = std::log(probs[i]);
  }
  return LogDistribution(std::move(lp));
}

LogDistribution LogDistribution::from_probs(std::initializer_list<double> probs) {
  return from_probs(std::span<const double>(probs.begin(), probs.size()));
}

LogDistribution LogDistribution::from_logits(std::span<const double> logits) {
  return normalized_from_logits(std::vector<double>(logits.begin(), logits.end()));
}

LogDistribution LogDistribution::from_logits(std::initializer_list<double> logits) {
  return from_logits(std::span<const double>(logits.begin(), logits.size()));
}

double LogDistribution::prob(Token i) const {
  return std::exp(log_probs_[static_cast<std::size_t>(i)]);
}

Token LogDistribution::argmax() const {
  if (log_probs_.empty()) {
    throw std::invalid_argument("LogDistribution: argmax of empty distribution");
  }
  Token best = 0;
  for (Token i = 1; i < size(); ++i) {
    if (log_probs_[static_cast<std::size_t>(i)] >
        log_probs_[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

void LogDistribution::validate(double tol) const {
  bool any_finite = false;
  double sum = 0.0;
  for (double lp : log_probs_) {
    if (std::isnan(lp) || lp > 0.0) {
      throw std::invalid_argument("LogDistribution: entry outside [-inf, 0]");
    }
    if (std::isfinite(lp)) any_finite = true;
    sum += std::exp(lp);
  }
  if (!any_finite) {
    throw std::invalid_argument("LogDistribution: no finite entry");
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument("LogDistribution: probabilities sum to " +
                                std::to_string(sum));
  }
}

LogDistribution normalized_from_logits(std::vector<double> logits) {
  const double lse = log_sum_exp(logits);
  if (!std::isfinite(lse)) {
    throw std::invalid_argument("LogDistribution: no finite logit");
  }
  for (double& x : logits) x -= lse;
  return LogDistribution(LogDistribution::Trusted{}, std::move(logits));
}

}  // namespace gcs

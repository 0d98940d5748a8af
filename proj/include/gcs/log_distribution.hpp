#pragma once

#include <span>
#include <vector>

#include "gcs/types.hpp"

namespace gcs {

// log(sum_i exp(xs_i)) with the usual max shift; -inf for an empty or
// all -inf input.
double log_sum_exp(std::span<const double> xs);

// A categorical next-token distribution in log space over a fixed
// vocabulary. Entries live in [-inf, 0] and the exponentials sum to one.
class LogDistribution {
 public:
  LogDistribution() = default;

  // Takes already-normalized log probabilities; validates the invariants.
  explicit LogDistribution(std::vector<double> log_probs);

  // Probabilities (nonnegative, summing to one within tolerance).
  static LogDistribution from_probs(std::span<const double> probs);
  static LogDistribution from_probs(std::initializer_list<double> probs);

  // Arbitrary logits; normalized here via log-sum-exp.
  static LogDistribution from_logits(std::span<const double> logits);
  static LogDistribution from_logits(std::initializer_list<double> logits);

  int size() const { return static_cast<int>(log_probs_.size()); }
  double operator[](Token i) const { return log_probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& log_probs() const { return log_probs_; }
  double prob(Token i) const;

  // Highest log-prob entry, lowest index on ties.
  Token argmax() const;

  // Throws std::invalid_argument unless at least one entry is finite, no
  // entry exceeds zero, and sum(exp(log_probs)) is one within `tol`.
  void validate(double tol = 1e-9) const;

 private:
  struct Trusted {};
  LogDistribution(Trusted, std::vector<double> log_probs)
      : log_probs_(std::move(log_probs)) {}

  friend LogDistribution normalized_from_logits(std::vector<double> logits);

  std::vector<double> log_probs_;
};

// Internal fast path: normalizes `logits` in place and skips re-validation.
LogDistribution normalized_from_logits(std::vector<double> logits);

}  // namespace gcs

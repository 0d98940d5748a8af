#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gcs::stats {

// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)| against a
// continuous reference CDF. Sorts a copy of the sample.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov critical value at significance 0.001, i.e. the D
// above which a correct sampler falls one time in a thousand.
double ks_critical_value(std::size_t n);

// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// CDF of the chi-square distribution with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

// Pearson goodness-of-fit of observed counts against a reference pmf.
// Zero-probability bins must hold zero counts; they contribute no degrees
// of freedom.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> counts,
                               std::span<const double> probs);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Welford accumulator; std_error() is the standard error of the mean.
class RunningMean {
 public:
  void add(double x);
  double mean() const { return mean_; }
  double std_error() const;
  std::size_t count() const { return n_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MeanStderr mean_stderr(std::span<const double> xs);

// Total variation distance 0.5 * sum_i |p_i - q_i| between two pmfs of
// equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace gcs::stats

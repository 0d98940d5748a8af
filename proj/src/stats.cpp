#include "gcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gcs::stats {

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_critical_value(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("ks_critical_value: n must be positive");
  }
  // sqrt(-log(alpha/2) / 2) at alpha = 0.001.
  constexpr double kCrit001 = 1.9494746035204052;
  return kCrit001 / std::sqrt(static_cast<double>(n));
}

namespace {

// Series expansion of P(a, x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x) = 1 - P(a, x), x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::domain_error("regularized_gamma_p: require a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) {
    throw std::domain_error("chi_square_cdf: dof must be positive");
  }
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> counts,
                               std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("chi_square_gof: size mismatch or empty input");
  }
  std::int64_t total = 0;
  for (const auto c : counts) {
    if (c < 0) throw std::invalid_argument("chi_square_gof: negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("chi_square_gof: all counts zero");

  ChiSquareResult result;
  int support = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] != 0) {
        result.statistic = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    ++support;
    const double expected = static_cast<double>(total) * probs[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    result.statistic += diff * diff / expected;
  }
  result.dof = support - 1;
  if (result.dof < 1) throw std::invalid_argument("chi_square_gof: support too small");
  result.p_value = std::isinf(result.statistic)
                       ? 0.0
                       : 1.0 - chi_square_cdf(result.statistic, result.dof);
  return result;
}

void RunningMean::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningMean::std_error() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  return std::sqrt(m2_ / (n - 1.0) / n);
}

MeanStderr mean_stderr(std::span<const double> xs) {
  RunningMean acc;
  for (const double x : xs) acc.add(x);
  return {acc.mean(), acc.std_error(), acc.count()};
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("total_variation: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace gcs::stats

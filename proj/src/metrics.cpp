#include "gcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace gcs::metrics {

namespace {

std::set<Token> token_set(const Response& response, Token eos_token) {
  std::set<Token> out;
  for (const Token t : response.tokens) {
    if (t != eos_token) out.insert(t);
  }
  return out;
}

}  // namespace

double jaccard(const Response& a, const Response& b, Token eos_token) {
  const auto sa = token_set(a, eos_token);
  const auto sb = token_set(b, eos_token);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t intersection = 0;
  for (const Token t : sa) intersection += sb.count(t);
  const std::size_t unions = sa.size() + sb.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(unions);
}

double exact_match(const Response& a, const Response& b) {
  return a.tokens == b.tokens ? 1.0 : 0.0;
}

double position_match_rate(const Response& a, const Response& b) {
  const std::size_t longest = std::max(a.tokens.size(), b.tokens.size());
  if (longest == 0) return 1.0;
  const std::size_t shared = std::min(a.tokens.size(), b.tokens.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < shared; ++i) {
    matches += a.tokens[i] == b.tokens[i] ? 1 : 0;
  }
  return static_cast<double>(matches) / static_cast<double>(longest);
}

double p_repeat_unbiased(std::span<const int> labels) {
  const std::size_t n = labels.size();
  if (n < 2) {
    throw std::domain_error("p_repeat_unbiased: need at least two labels");
  }
  double ones = 0.0;
  for (const int label : labels) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument("p_repeat_unbiased: labels must be 0 or 1");
    }
    ones += label;
  }
  const double count = static_cast<double>(n);
  const double phat = ones / count;
  const double naive = phat * phat + (1.0 - phat) * (1.0 - phat);
  return count / (count - 1.0) * naive - 1.0 / (count - 1.0);
}

double theorem1_joint(const LogDistribution& p, const LogDistribution& q,
                      Token k) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (p.size() != q.size()) {
    throw std::invalid_argument("theorem1_joint: vocab size mismatch");
  }
  if (k < 0 || k >= p.size()) {
    throw std::out_of_range("theorem1_joint: category out of range");
  }
  const double lp_k = p[k];
  const double lq_k = q[k];
  if (lp_k == kNegInf || lq_k == kNegInf) return 0.0;
  double ratio_sum = 0.0;
  for (Token i = 0; i < p.size(); ++i) {
    if (i == k) continue;
    ratio_sum += std::max(std::exp(p[i] - lp_k), std::exp(q[i] - lq_k));
  }
  return 1.0 / (1.0 + ratio_sum);
}

}  // namespace gcs::metrics

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gcs/gumbel.hpp"
#include "gcs/keyed_rng.hpp"
#include "gcs/log_distribution.hpp"
#include "gcs/stats.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<gcs::GumbelNoise> fresh_noise(std::uint64_t seed, int vocab,
                                          std::int64_t counter) {
  std::vector<gcs::GumbelNoise> noise;
  noise.reserve(static_cast<std::size_t>(vocab));
  for (int i = 0; i < vocab; ++i) {
    noise.push_back(gcs::keyed_standard_gumbel(seed, i, counter));
  }
  return noise;
}

}  // namespace

TEST_SUITE("gumbel") {

TEST_CASE("quantile matches the closed form and rejects the boundary") {
  CHECK(gcs::gumbel_quantile(0.5) ==
        doctest::Approx(0.36651292058166433).epsilon(1e-12));
  for (double u : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    CHECK(gcs::gumbel_cdf(gcs::gumbel_quantile(u)) ==
          doctest::Approx(u).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gcs::gumbel_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(gcs::gumbel_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(gcs::gumbel_quantile(-0.5), std::domain_error);
  CHECK_THROWS_AS(gcs::gumbel_quantile(1.5), std::domain_error);
  CHECK_THROWS_AS(gcs::gumbel_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("cdf matches the closed form and is total on the extended reals") {
  CHECK(gcs::gumbel_cdf(2.0) ==
        doctest::Approx(0.87342301849311664).epsilon(1e-12));
  CHECK(gcs::gumbel_cdf(0.0) ==
        doctest::Approx(0.36787944117144232).epsilon(1e-12));
  CHECK(gcs::gumbel_cdf(-kInf) == 0.0);
  CHECK(gcs::gumbel_cdf(kInf) == 1.0);
}

TEST_CASE("keyed draws are deterministic and sensitive to every key part") {
  const auto a = gcs::keyed_standard_gumbel(42, 7, 3);
  const auto b = gcs::keyed_standard_gumbel(42, 7, 3);
  CHECK(a.value == b.value);
  CHECK(a.log_uniform == b.log_uniform);

  CHECK(gcs::keyed_standard_gumbel(43, 7, 3).value != a.value);
  CHECK(gcs::keyed_standard_gumbel(42, 8, 3).value != a.value);
  CHECK(gcs::keyed_standard_gumbel(42, 7, 4).value != a.value);

  CHECK_THROWS_AS(gcs::keyed_standard_gumbel(42, -1, 0), std::domain_error);
  CHECK_THROWS_AS(gcs::keyed_standard_gumbel(42, 0, -1), std::domain_error);
}

TEST_CASE("dual representation keeps log_uniform equal to -exp(-value)") {
  for (int i = 0; i < 1000; ++i) {
    const auto g = gcs::keyed_standard_gumbel(99, i, 0);
    const double expected = -std::exp(-g.value);
    CHECK(g.log_uniform == doctest::Approx(expected).epsilon(1e-12));
    CHECK(g.log_uniform < 0.0);
  }
  const auto r = gcs::GumbelNoise::from_log_uniform(-0.25);
  CHECK(r.log_uniform == -0.25);
  CHECK(r.value == doctest::Approx(-std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("keyed draws pass a KS test against the gumbel cdf") {
  constexpr int kN = 100000;
  std::vector<double> sample;
  sample.reserve(kN);
  for (int i = 0; i < kN; ++i) {
    sample.push_back(gcs::keyed_standard_gumbel(2024, i % 50, i / 50).value);
  }
  const double d = gcs::stats::ks_statistic(
      std::move(sample), [](double x) { return gcs::gumbel_cdf(x); });
  CHECK(d < gcs::stats::ks_critical_value(kN));
}

TEST_CASE("perturbed argmax realizes the categorical distribution") {
  const auto dist =
      gcs::LogDistribution::from_probs({0.05, 0.1, 0.15, 0.2, 0.5});
  constexpr int kTrials = 1000000;
  std::vector<std::int64_t> counts(5, 0);
  for (int t = 0; t < kTrials; ++t) {
    const auto noise = fresh_noise(7, 5, t);
    ++counts[static_cast<std::size_t>(gcs::perturbed_argmax(dist, noise))];
  }
  const auto gof = gcs::stats::chi_square_gof(
      counts, std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.5});
  CHECK(gof.p_value > 0.001);
}

TEST_CASE("argmax and exponential-race routes agree") {
  for (int rep = 0; rep < 300; ++rep) {
    gcs::keyed::Stream rng(555, static_cast<std::uint64_t>(rep));
    const int vocab = 2 + static_cast<int>(rng.uniform() * 11);
    std::vector<double> probs(static_cast<std::size_t>(vocab), 0.0);
    double total = 0.0;
    for (auto& p : probs) {
      p = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      total += p;
    }
    if (total == 0.0) probs[0] = total = 1.0;
    for (auto& p : probs) p /= total;
    const auto dist = gcs::LogDistribution::from_probs(probs);
    const auto noise = fresh_noise(556, vocab, rep);
    CHECK(gcs::perturbed_argmax(dist, noise) ==
          gcs::perturbed_argmax_by_race(dist, noise));
  }
}

TEST_CASE("argmax breaks ties to the lowest index and skips zero probability") {
  const auto uniform3 = gcs::LogDistribution::from_probs({1.0 / 3, 1.0 / 3, 1.0 / 3});
  std::vector<gcs::GumbelNoise> tied(3, gcs::GumbelNoise::from_uniform(0.5));
  CHECK(gcs::perturbed_argmax(uniform3, tied) == 0);

  const auto point = gcs::LogDistribution::from_probs({0.0, 1.0});
  std::vector<gcs::GumbelNoise> noise = {gcs::GumbelNoise::from_uniform(0.999999),
                                         gcs::GumbelNoise::from_uniform(0.000001)};
  CHECK(gcs::perturbed_argmax(point, noise) == 1);
  CHECK(gcs::perturbed_argmax_by_race(point, noise) == 1);

  std::vector<gcs::GumbelNoise> short_noise(1, gcs::GumbelNoise::from_uniform(0.5));
  CHECK_THROWS_AS(gcs::perturbed_argmax(point, short_noise), std::invalid_argument);
}

}  // TEST_SUITE("gumbel")

#pragma once

#include <cstdint>
#include <vector>

#include "gcs/verification.hpp"

namespace gcs {

// Bundled statistical verification suites, shared by the command-line
// `verify` subcommand and the acceptance harness. Each suite is
// deterministic in (trials, seed) and returns one report per comparison.

// Coupled-match agreement with the closed form: the worked two-category
// case plus 20 random pairs cycling through vocab sizes 2, 4, 8. Judged at
// |z| <= 5 because the suite makes nearly a hundred comparisons.
std::vector<StatReport> coupled_match_suite(std::int64_t trials,
                                            std::uint64_t seed);

// Marginal preservation of recycling: per-prefix conditional TV distance on
// an exactly enumerable four-symbol chain under fresh-latent generation
// with recycling.
std::vector<StatReport> marginal_preservation_suite(std::int64_t trials,
                                                    std::uint64_t seed);

// Product-form intersection probability for 10 random constant sets with
// A + B + sum(C) = 1, judged at |z| <= 5.
std::vector<StatReport> product_intersection_suite(std::int64_t trials,
                                                   std::uint64_t seed);

// Exact two-distribution closed form plus optimality probes on 20 random
// distribution sets; trials sets the number of probe perturbations per set.
std::vector<StatReport> ensemble_suite(std::int64_t trials, std::uint64_t seed);

// Unbiasedness of the repeat-probability estimator across label
// probabilities and sample sizes; trials sets the replications per point.
std::vector<StatReport> estimator_suite(std::int64_t trials, std::uint64_t seed);

}  // namespace gcs

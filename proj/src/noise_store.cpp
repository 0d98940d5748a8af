#include "gcs/noise_store.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gcs/errors.hpp"

namespace gcs {

NoiseStore::NoiseStore(std::uint64_t seed, int vocab_size)
    : seed_(seed), vocab_size_(vocab_size) {
  if (vocab_size < 1) {
    throw std::invalid_argument("NoiseStore: vocab_size must be positive");
  }
}

GumbelNoise NoiseStore::fresh(Token token, std::int64_t counter) const {
  if (token < 0 || token >= vocab_size_) {
    throw std::out_of_range("NoiseStore::fresh: token out of range");
  }
  return keyed_standard_gumbel(seed_, token, counter);
}

ResponseNoiseState init_state(const NoiseStore& store) {
  ResponseNoiseState state;
  const int vocab = store.vocab_size();
  state.counters.assign(static_cast<std::size_t>(vocab), 0);
  state.current.reserve(static_cast<std::size_t>(vocab));
  for (Token i = 0; i < vocab; ++i) {
    state.current.push_back(store.fresh(i, 0));
  }
  return state;
}

void recycle(ResponseNoiseState& state, const NoiseStore& store, Token k,
             const LogDistribution& dist) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const int vocab = store.vocab_size();
  if (dist.size() != vocab ||
      state.current.size() != static_cast<std::size_t>(vocab) ||
      state.counters.size() != static_cast<std::size_t>(vocab)) {
    throw std::invalid_argument("recycle: vocab size mismatch");
  }
  if (k < 0 || k >= vocab) {
    throw std::out_of_range("recycle: selected token out of range");
  }
  const double lp_k = dist[k];
  if (lp_k == kNegInf) {
    throw ContractViolation("recycle: selected token has zero probability");
  }
  if (perturbed_argmax(dist, state.current) != k) {
    throw ContractViolation("recycle: selected token is not the perturbed argmax");
  }

  // Conditioned on k's win, each surviving lane's uniform is uniform below a
  // bound whose log is log_u_k * (h_i / h_k); dividing by that bound is the
  // subtraction below. Running on log-uniforms avoids saturating near 1 and
  // underflowing near 0.
  const double log_u_k = state.current[static_cast<std::size_t>(k)].log_uniform;
  for (Token i = 0; i < vocab; ++i) {
    if (i == k) continue;
    const std::size_t idx = static_cast<std::size_t>(i);
    const double lp_i = dist[i];
    if (lp_i == kNegInf) continue;
    const double log_u_new =
        state.current[idx].log_uniform - log_u_k * std::exp(lp_i - lp_k);
    if (!(log_u_new < 0.0)) {
      throw ContractViolation("recycle: renewed uniform left (0,1)");
    }
    state.current[idx] = GumbelNoise::from_log_uniform(log_u_new);
  }
  auto& count_k = state.counters[static_cast<std::size_t>(k)];
  ++count_k;
  state.current[static_cast<std::size_t>(k)] = store.fresh(k, count_k);
}

}  // namespace gcs

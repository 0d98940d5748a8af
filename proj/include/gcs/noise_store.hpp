#pragma once

#include <cstdint>
#include <vector>

#include "gcs/gumbel.hpp"
#include "gcs/log_distribution.hpp"
#include "gcs/types.hpp"

namespace gcs {

// Shared table of fresh Gumbel draws addressed by (token, use count),
// fully determined by the latent seed. Responses built against the same
// seed read identical fresh values, which is what couples them.
class NoiseStore {
 public:
  NoiseStore(std::uint64_t seed, int vocab_size);

  GumbelNoise fresh(Token token, std::int64_t counter) const;

  int vocab_size() const { return vocab_size_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  int vocab_size_ = 0;
};

// Per-response cursor into the store: how often each token's lane has been
// refreshed, plus the live noise vector after any recycling.
struct ResponseNoiseState {
  std::vector<std::int64_t> counters;
  std::vector<GumbelNoise> current;
};

ResponseNoiseState init_state(const NoiseStore& store);

// Advances the state after token k won the perturbed argmax under dist.
// k's lane is refreshed from the store at its next counter; every other
// positive-probability lane is renewed conditioned on k's win, which keeps
// each marginal standard Gumbel. Lanes with zero probability stay untouched.
void recycle(ResponseNoiseState& state, const NoiseStore& store, Token k,
             const LogDistribution& dist);

}  // namespace gcs

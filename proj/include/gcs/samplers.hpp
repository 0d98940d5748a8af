#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcs/log_distribution.hpp"
#include "gcs/types.hpp"

namespace gcs {

// IS draws independent noise per response; GCS reuses one keyed noise vector
// per generated position across responses; GCSwR additionally recycles the
// noise through a shared counter store so correlation survives divergence.
enum class SamplerKind { IS, GCS, GCSwR };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

// Deterministic next-token distribution provider: same (prompt, prefix) in,
// same distribution out. Implementations must tolerate concurrent queries.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual LogDistribution next(std::span<const Token> prompt,
                               std::span<const Token> prefix) const = 0;
  virtual int vocab_size() const = 0;
  virtual Token eos_token() const = 0;
};

struct SamplerConfig {
  SamplerKind kind = SamplerKind::GCSwR;
  double temperature = 1.0;
  std::uint64_t latent_seed = 0;
  std::uint64_t rng_seed = 0;  // consumed by IS only
  int max_tokens = 16;
};

struct Response {
  std::vector<Token> tokens;  // includes eos when reached, never past it
  bool finished = false;      // true iff eos was generated

  friend bool operator==(const Response&, const Response&) = default;
};

// temperature 1 is the identity; positive temperatures log-softmax the
// scaled log-probs; temperature 0 collapses to one-hot at the argmax
// (lowest index on ties). Negative temperatures are a domain error.
LogDistribution apply_temperature(const LogDistribution& dist, double temperature);

Response generate(const SequenceModel& model, std::span<const Token> prompt,
                  const SamplerConfig& config);

}  // namespace gcs

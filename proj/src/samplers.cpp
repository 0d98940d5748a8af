#include "gcs/samplers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gcs/errors.hpp"
#include "gcs/gumbel.hpp"
#include "gcs/noise_store.hpp"

namespace gcs {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::IS: return "IS";
    case SamplerKind::GCS: return "GCS";
    case SamplerKind::GCSwR: return "GCSwR";
  }
  throw std::logic_error("to_string: unknown sampler kind");
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "IS") return SamplerKind::IS;
  if (name == "GCS") return SamplerKind::GCS;
  if (name == "GCSwR") return SamplerKind::GCSwR;
  throw ConfigError("unknown sampler kind: " + name);
}

LogDistribution apply_temperature(const LogDistribution& dist, double temperature) {
  if (!(temperature >= 0.0)) {
    throw std::domain_error("apply_temperature: temperature must be >= 0");
  }
  if (temperature == 1.0) return dist;
  if (temperature == 0.0) {
    std::vector<double> one_hot(static_cast<std::size_t>(dist.size()), 0.0);
    one_hot[static_cast<std::size_t>(dist.argmax())] = 1.0;
    return LogDistribution::from_probs(one_hot);
  }
  std::vector<double> scaled(static_cast<std::size_t>(dist.size()));
  for (Token i = 0; i < dist.size(); ++i) {
    scaled[static_cast<std::size_t>(i)] = dist[i] / temperature;
  }
  return normalized_from_logits(std::move(scaled));
}

namespace {

std::vector<GumbelNoise> keyed_noise_vector(std::uint64_t seed, int vocab,
                                            std::int64_t counter) {
  std::vector<GumbelNoise> noise;
  noise.reserve(static_cast<std::size_t>(vocab));
  for (Token i = 0; i < vocab; ++i) {
    noise.push_back(keyed_standard_gumbel(seed, i, counter));
  }
  return noise;
}

}  // namespace

Response generate(const SequenceModel& model, std::span<const Token> prompt,
                  const SamplerConfig& config) {
  const int vocab = model.vocab_size();
  if (config.max_tokens < 1) {
    throw std::domain_error("generate: max_tokens must be >= 1");
  }
  for (const Token t : prompt) {
    if (t < 0 || t >= vocab) {
      throw std::out_of_range("generate: prompt token outside the vocabulary");
    }
  }

  NoiseStore store(config.latent_seed, vocab);
  ResponseNoiseState state;
  if (config.kind == SamplerKind::GCSwR) {
    state = init_state(store);
  }

  Response response;
  response.tokens.reserve(static_cast<std::size_t>(config.max_tokens));
  for (int t = 0; t < config.max_tokens; ++t) {
    const LogDistribution dist = apply_temperature(
        model.next(prompt, response.tokens), config.temperature);
    Token picked = -1;
    switch (config.kind) {
      case SamplerKind::IS:
        picked = perturbed_argmax(dist, keyed_noise_vector(config.rng_seed, vocab, t));
        break;
      case SamplerKind::GCS:
        picked = perturbed_argmax(dist, keyed_noise_vector(config.latent_seed, vocab, t));
        break;
      case SamplerKind::GCSwR:
        picked = perturbed_argmax(dist, state.current);
        recycle(state, store, picked, dist);
        break;
    }
    response.tokens.push_back(picked);
    if (picked == model.eos_token()) {
      response.finished = true;
      break;
    }
  }
  return response;
}

}  // namespace gcs

#pragma once

#include <cmath>
#include <cstdint>

namespace gcs::keyed {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Stafford mix13 finalizer; bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Absorbs (a, b, lane) into the seed with one mixing round per word.
inline constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t lane) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h + kGolden + a);
  h = mix64(h + kGolden + b);
  h = mix64(h + kGolden + lane);
  return h;
}

// Uniform draw on the open interval (0,1) at 53-bit resolution. The grid
// endpoint 0 is rejected and redrawn on the next lane, never clipped.
inline double open_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t lane = 0) {
  for (;; ++lane) {
    const std::uint64_t m = bits(seed, a, b, lane) >> 11;
    if (m != 0) return static_cast<double>(m) * 0x1.0p-53;
  }
}

// Child key for an independent substream (per trial, per pair, per run).
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed + kGolden) + kGolden + index);
}

// Sequential draws under one (seed, stream) key. Rejection samplers consume
// lanes in order, so every variate is reproducible from the key alone.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), id_(stream_id) {}

  double uniform() { return open_uniform(seed_, id_, next_++); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * kPi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // log of a Gamma(shape, 1) variate; staying in log space keeps draws with
  // tiny shape finite.
  double log_gamma(double shape) {
    if (shape < 1.0) {
      return log_gamma(shape + 1.0) + std::log(uniform()) / shape;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      const double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return std::log(d) + std::log(v);
      }
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::uint64_t seed_;
  std::uint64_t id_;
  std::uint64_t next_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gcs::keyed

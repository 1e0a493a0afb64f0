#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "errors.hpp"

namespace erc {

// Deterministic PRNG: xoshiro256** seeded through splitmix64.
//
// Every piece of randomness in the library flows through this generator,
// seeded explicitly from scenario configs. No ambient entropy is used, so a
// (config, seed) pair reproduces trajectories bit for bit. Sub-streams for
// batch runs are derived with split(), which hashes the parent seed and the
// stream index through splitmix64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) from the high 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Categorical sample by CDF inversion. probs must be a (sub)normalized
  // probability vector; the last positive entry absorbs rounding slack.
  int sample(std::span<const double> probs) {
    if (probs.empty()) throw PreconditionError("Rng::sample: empty probability vector");
    const double r = next_double();
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) last_positive = static_cast<int>(i);
      cum += probs[i];
      if (r < cum && probs[i] > 0.0) return static_cast<int>(i);
    }
    if (last_positive < 0) throw PreconditionError("Rng::sample: all-zero probability vector");
    return last_positive;
  }

  // Independent child stream: seed' = splitmix64(seed ^ golden * (index + 1)).
  Rng split(std::uint64_t index) const {
    std::uint64_t sm = seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace erc

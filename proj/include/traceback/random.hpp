#pragma once

#include <cstdint>
#include <limits>

namespace traceback {

// Deterministic RNG layer. Monte Carlo results must be reproducible across
// platforms and worker counts, so the engine and all real-valued draws are
// defined here bit-for-bit instead of going through <random> distributions
// (whose output is implementation-defined).

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function (Steele, Lea, Flood). Bijective 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna). Fast, 256-bit state, passes BigCrush.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  // Stream for one trial: mixing the trial index into the seed material
  // gives every trial its own engine, so a run is reproducible no matter
  // how trials are distributed over threads.
  static Xoshiro256pp for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
    return Xoshiro256pp(seed + kGoldenGamma * (trial + 1));
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Uniform double on the open interval (0,1): 53-bit bin midpoints.
// Never returns 0 or 1, so log(u) and log(-log(u)) are always finite.
template <class Rng>
inline double uniform_open(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace traceback

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace trapwalk {

// SplitMix64 finalizer. Counter-based randomness everywhere in this library is
// built from this one mixer so that draws are a pure function of (seed, key).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t hash_key(std::uint64_t state, std::uint64_t key) noexcept {
  return mix64((state + kGolden) ^ (key * 0x94d049bb133111ebULL));
}

// Chained keyed hash: derive_seed(seed, {a, b, c}) is the substream seed for
// counter (a, b, c). Order matters; arity matters through the chain length.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = seed;
  for (std::uint64_t k : keys) h = hash_key(h, k);
  return mix64(h + kGolden);
}

// Sequential stream over the SplitMix64 state walk.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return double(next() >> 11) * 0x1.0p-53; }

  // Exp(1) via inversion; uniform01() < 1 keeps the log finite.
  double exponential() noexcept { return -std::log1p(-uniform01()); }

  // Uniform integer in [0, n) by the multiply-high method.
  std::uint64_t below(std::uint64_t n) noexcept {
    return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Geometric on {0,1,2,...} with P(k) = p (1-p)^k, by inversion.
inline std::int64_t geometric_draw(SplitMix64& rng, double log1mp) noexcept {
  double u = rng.uniform01();
  if (u <= 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / log1mp));
}

}  // namespace trapwalk

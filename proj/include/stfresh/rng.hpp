#pragma once

// Deterministic random streams: SplitMix64 for seed derivation and
// xoshiro256** as the workhorse generator. Both algorithms are pinned by
// their reference implementations, so every stream is bit-identical across
// platforms and compilers.

#include <cstdint>

namespace stfresh {

// SplitMix64 finalizer (Steele, Lea, Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna), state filled through SplitMix64 as
// recommended by the authors.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() noexcept {
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

  // Uniform double in [0, 1) built from the top 53 bits.
  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Uniform integer in [0, n). The modulo bias is below n / 2^64, far under
  // anything resolvable by the statistical tests this library runs.
  std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Key for an auxiliary stream: a pure function of (seed, index), so streams
// can be re-derived in any order.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace stfresh

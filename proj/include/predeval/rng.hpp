#pragma once

#include <cstdint>
#include <span>

// Deterministic, platform-independent random numbers. std::mt19937 would be
// portable but std::uniform_int_distribution is not; we need byte-identical
// output everywhere, so both the generator and the bounded draw are fixed
// here. Substreams are derived from (seed, index) so that work can be
// distributed without changing results.

namespace predeval {

// splitmix64 step (Steele, Lea, Flood / Vigna)
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna), seeded via splitmix64
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    for (auto& w : state_) w = splitmix64(seed);
  }

  // Independent substream for (seed, index).
  static Rng substream(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t mix = seed;
    std::uint64_t a = splitmix64(mix);
    mix ^= index * 0xD1B54A32D192ED03ULL + a;
    return Rng(splitmix64(mix));
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

  // Unbiased uniform draw from [0, bound); bound >= 1. Lemire's method.
  std::uint64_t bounded(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    if (j != i - 1) std::swap(items[i - 1], items[j]);
  }
}

}  // namespace predeval

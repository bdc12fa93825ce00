#pragma once

// Deterministic random number generation shared by every seeded step.
//
// The algorithms and constants here are normative: generation and detection
// must agree bit-for-bit, including across ports to other languages.
//
//   mix64        splitmix64 finalizer (Stafford variant 13)
//   SplitMix64   state += 0x9e3779b97f4a7c15; output mix64(state)
//   Xoshiro256   xoshiro256** 1.0, state filled by four SplitMix64 outputs
//   uniform01    (next() >> 11) * 2^-53
//   below(n)     high 64 bits of next() * n (multiply-shift, no rejection)
//   normal       Box-Muller cosine branch, u1 = 1 - uniform01(), u2 = uniform01()

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace semwm {

namespace detail {
__extension__ using u128 = unsigned __int128;
}  // namespace detail

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Sub-seed for a named purpose, derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::string_view label) noexcept {
  return mix64(master ^ mix64(fnv1a64(label)));
}

/// Sub-seed for the index-th stream of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(master + kGoldenGamma * (index + 1));
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Integer in [0, n); n must be positive.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<detail::u128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  double normal() noexcept {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace semwm

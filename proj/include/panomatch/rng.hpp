#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "panomatch/errors.hpp"

namespace panomatch {

namespace detail {

inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer: full-avalanche mix of a 64-bit word.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t combine_key(std::uint64_t h, std::uint64_t part) {
  return mix64(h + kSplitmixGamma + part);
}

}  // namespace detail

/// Derives a stream key from a seed plus an arbitrary mix of integer and
/// string components. Identical components always yield the identical key,
/// independent of platform.
inline std::uint64_t rng_key(std::uint64_t seed) { return detail::mix64(seed + detail::kSplitmixGamma); }

template <typename Part, typename... Rest>
std::uint64_t rng_key(std::uint64_t seed, Part part, Rest... rest) {
  std::uint64_t p;
  if constexpr (std::is_convertible_v<Part, std::string_view>) {
    p = detail::fnv1a64(std::string_view(part));
  } else {
    p = static_cast<std::uint64_t>(part);
  }
  return rng_key(detail::combine_key(seed, p), rest...);
}

/// Counter-based deterministic generator (splitmix64). The entire output
/// stream is a pure function of the key, so independently keyed streams are
/// reproducible across platforms and scheduling orders.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += detail::kSplitmixGamma;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("next_below: bound must be positive");
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

  /// Standard normal via Box-Muller. Spelled out here so the stream is fixed
  /// by this code, not by the standard library's unspecified distributions.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    const double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  std::vector<double> gaussian_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = next_gaussian();
    return v;
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace panomatch

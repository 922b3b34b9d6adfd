#pragma once

#include <cmath>
#include <cstdint>

#include "stablesde/special_functions.hpp"

namespace stablesde {

// Identifies one logical random stream. Streams derived from distinct
// (seed, stream_id) pairs are treated as independent; all draws are pure
// functions of the key, never of global state.
struct RngStreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngStreamKey&, const RngStreamKey&) = default;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Hash-derived substream: child streams of one parent never collide with
// each other and are decorrelated from the parent by the 64-bit mixer.
inline RngStreamKey derive_stream(const RngStreamKey& parent, std::uint64_t lane) {
  RngStreamKey child;
  child.seed = parent.seed;
  child.stream_id = detail::mix64(detail::mix64(parent.stream_id) ^ (lane + 0x63652A4D95F4A4C1ULL));
  return child;
}

// Counter-based generator: output i is mix64(base + i * odd_gamma), so any
// draw is reproducible from (key, position) alone and skipping is O(1).
class CounterRng {
 public:
  explicit CounterRng(const RngStreamKey& key)
      : base_(detail::mix64(key.seed) ^ detail::mix64(detail::mix64(key.stream_id) + 0x9E3779B97F4A7C15ULL)),
        counter_(0) {}

  std::uint64_t next_u64() {
    return detail::mix64(base_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Open interval (0,1): offset by half an ulp of the 2^-53 grid so that
  // log() and inverse-CDF transforms never see an endpoint.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_open01(); }

  double next_exponential() { return -std::log(next_open01()); }

  // One Box-Muller value; always consumes exactly two uniforms.
  double next_normal() {
    const double u1 = next_open01();
    const double u2 = next_open01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Exact Poisson via unit-exponential race; runs in O(mean) expected time.
  std::uint64_t next_poisson(double mean) {
    std::uint64_t count = 0;
    double acc = next_exponential();
    while (acc <= mean) {
      ++count;
      acc += next_exponential();
    }
    return count;
  }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_;
};

}  // namespace stablesde

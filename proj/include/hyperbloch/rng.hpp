#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

// Deterministic random streams. Every random quantity in the library is
// drawn from a Stream derived from (root seed, stream id, index) through
// splitmix64 mixing, so results are reproducible bit-for-bit regardless of
// how the surrounding loops are scheduled. No global RNG anywhere.

namespace hyperbloch::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combiner used for sub-stream derivation.
inline std::uint64_t derive(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
  std::uint64_t m = splitmix64(s);
  return m ^ b;
}

// Stream identifiers (one per random purpose).
inline constexpr std::uint64_t kStreamJacobian = 0x4a61636f6269616eULL;
inline constexpr std::uint64_t kStreamHaar = 0x4861617254757065ULL;
inline constexpr std::uint64_t kStreamTwist = 0x5477697374436873ULL;
inline constexpr std::uint64_t kStreamTest = 0x5465737453747265ULL;

// xoshiro256++ with splitmix64 seeding. Uniform doubles use the top 53 bits;
// gaussians use Box-Muller. Both are written out explicitly rather than via
// <random> distributions so that streams do not depend on the standard
// library implementation.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  Stream(std::uint64_t root, std::uint64_t stream_id, std::uint64_t index)
      : Stream(derive(derive(root, stream_id), index)) {}

  std::uint64_t next_u64() {
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

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Complex normal with E|z|^2 = 1.
  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace hyperbloch::rng

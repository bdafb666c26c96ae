#pragma once

#include <complex>
#include <cstdint>
#include <utility>

namespace csda {

namespace detail {

// SplitMix64 finalizer. Invertible 64-bit mixing permutation.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Counter-based pseudo-random stream.
//
// A stream is identified by (seed, stream_id) and its n-th output is a pure
// function of (seed, stream_id, n). That gives two properties the simulator
// relies on:
//   * splittability: windows own disjoint streams (stream_id = window index)
//     and can be generated concurrently in any order;
//   * addressability: seek() jumps to an absolute draw index, so the k-th
//     sample of a window always consumes the same underlying draws no matter
//     what was (or was not) drawn for earlier samples.
//
// Identical (seed, stream_id) reproduces the identical sequence bit-for-bit
// on any platform with IEEE-754 doubles.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed),
        stream_id_(stream_id),
        key_(detail::mix64(detail::mix64(seed) +
                           detail::kGolden * (stream_id + 1))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  // Position the stream so the next draw consumes absolute index `counter`.
  void seek(std::uint64_t counter) { counter_ = counter; }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + detail::kGolden * counter_++);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; used where log(u) must stay finite.
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // One Bernoulli(p) draw; consumes exactly one u64.
  bool bernoulli(double p) { return uniform() < p; }

  // Two independent N(0,1) variates via Box-Muller; consumes exactly two
  // u64s. Hand-rolled (not std::normal_distribution) so the byte-for-byte
  // reproducibility contract does not depend on the standard library.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  // Circularly-symmetric complex normal with E[|z|^2] = 1; consumes two u64s.
  std::complex<double> complex_normal() {
    auto [a, b] = normal_pair();
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    return {a * kInvSqrt2, b * kInvSqrt2};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace csda

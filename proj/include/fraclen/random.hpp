#pragma once

// Counter-based random streams.
//
// Every Monte-Carlo sample owns a stream derived from (master seed, sample
// index), so a sample's draws never depend on which worker evaluates it or on
// how many samples were evaluated before it.

#include <cstdint>
#include <limits>
#include <random>

namespace fraclen {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Seed of the stream owned by `index` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it plugs into
/// the standard distributions. Cheap to construct, which is what per-sample
/// streams need.
class SampleStream {
 public:
  using result_type = std::uint64_t;

  explicit SampleStream(std::uint64_t seed) noexcept : state_(seed) {}
  SampleStream(std::uint64_t master, std::uint64_t index) noexcept
      : state_(derive_seed(master, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open_closed() noexcept { return 1.0 - uniform(); }

  double normal() { return normal_(*this); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fraclen

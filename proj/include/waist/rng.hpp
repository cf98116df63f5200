#pragma once

#include <cstdint>
#include <limits>

namespace waist {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator keyed by (seed, stream, index).
///
/// Every sample index owns an independent stream, so a sample's value does
/// not depend on which worker produced it or in which order. Satisfies
/// UniformRandomBitGenerator and can drive the <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : key_(splitmix64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)) + index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return splitmix64(key_ + counter_ * 0xd1342543de82ef95ULL);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open0() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream identifiers used across the library; one per independent purpose.
namespace streams {
inline constexpr std::uint64_t samples = 0;
inline constexpr std::uint64_t fiber = 1;
inline constexpr std::uint64_t cloud = 2;
inline constexpr std::uint64_t sections = 3;
inline constexpr std::uint64_t trials = 4;
inline constexpr std::uint64_t ball = 5;
inline constexpr std::uint64_t probes = 6;
}  // namespace streams

}  // namespace waist

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lcdr {

/// Stream ids used by the pipeline. Each stream is an independent generator
/// derived from the user seed, so adding draws to one never shifts another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kSynth = 3,
  kPowerIteration = 4,
};

/// Portable PRNG.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Its 64-bit seed is SplitMix64(seed + stream * 0x9E3779B97F4A7C15).
/// All conversions to reals, normals and indices are implemented here rather
/// than through <random> distributions, whose algorithms are
/// implementation-defined; results are identical on every conforming platform.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Box-Muller transform (spare value cached).
  double normal();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Fisher-Yates shuffle of [0, n), iterating from the back.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lcdr

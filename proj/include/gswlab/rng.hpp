#pragma once

#include <cstdint>
#include <span>

namespace gswlab {

/// Counter-keyed xoshiro256** generator.
///
/// A generator is identified by (seed, stream, substream). Replicate r of an
/// experiment with seed s draws from Rng(s, r, k), so results never depend on
/// the order in which replicates are scheduled. All variates are produced by
/// code in this library (no std:: distributions), which keeps the streams
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal variate (polar Box-Muller, pairs cached).
  double normal();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  void fill_normal(std::span<double> out);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer, exposed for hashing seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace gswlab

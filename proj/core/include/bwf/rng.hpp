#pragma once

#include <cstdint>

namespace bwf {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Seed derivation for parallel streams: trial/substream seeds are pure
/// functions of (master, stream, index), so results never depend on the
/// execution schedule.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

/// Counter-based generator. A stream is identified by (seed, stream, index);
/// draws within a stream are sequential but the stream itself is stateless
/// with respect to every other stream.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via the inverse CDF (one uniform per variate).
  double normal();
  /// Chi-square with p degrees of freedom; consumes a fixed number of draws.
  double chi_square(int p);

 private:
  std::uint64_t state_;
};

}  // namespace bwf

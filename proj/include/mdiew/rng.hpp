#ifndef MDIEW_RNG_HPP
#define MDIEW_RNG_HPP

#include <cstdint>

namespace mdiew {

/// Counter-based random stream: every output is a strong 64-bit mix of
/// (seed, stream, counter), so streams derived from the same seed are
/// independent and a given (seed, stream) pair always reproduces the same
/// sequence, regardless of how work is partitioned across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal deviate (Box-Muller; draws are paired internally).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace mdiew

#endif  // MDIEW_RNG_HPP

#include "mdiew/rng.hpp"

#include <cmath>
#include <numbers>

namespace mdiew {

namespace {

// Stafford variant 13 of the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL;
  z = mix64(z ^ mix64(stream_ + 0xd1b54a32d192ed03ULL));
  z = mix64(z ^ mix64(counter_++ + 0x8cb92ba72f3d8dd7ULL));
  return z;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller on (0,1] x [0,1)
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  cached_normal_ = mag * std::sin(ang);
  has_cached_normal_ = true;
  return mag * std::cos(ang);
}

}  // namespace mdiew

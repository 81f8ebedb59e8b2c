#pragma once

#include <cstdint>
#include <utility>

namespace rrt_mppi {

// Purposes keep rollout sampling and plant noise on disjoint streams.
enum class StreamPurpose : std::uint64_t {
  kRollout = 1,
  kPlant = 2,
};

/// Counter-based Gaussian source. Draw (i, j) is a pure function of
/// (seed, purpose, epoch, i, j), so parallel consumers see the same values
/// regardless of scheduling or draw order.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t epoch);

  /// Two independent standard normals for counter (i, j).
  std::pair<double, double> standard_normal_pair(std::uint64_t i, std::uint64_t j) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rrt_mppi

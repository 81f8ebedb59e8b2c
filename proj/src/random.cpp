#include "rrt_mppi/random.hpp"

#include <cmath>

#include "rrt_mppi/geometry.hpp"

namespace rrt_mppi {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Position n of the splitmix64 sequence started at `key`.
inline std::uint64_t splitmix_at(std::uint64_t key, std::uint64_t n) {
  return mix64(key + (n + 1) * kGolden);
}
}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t epoch)
    : key_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(purpose)) ^ (epoch * kGolden))) {}

std::pair<double, double> NoiseStream::standard_normal_pair(std::uint64_t i, std::uint64_t j) const {
  const std::uint64_t counter = (i << 32) ^ j;
  const std::uint64_t h1 = splitmix_at(key_, 2 * counter);
  const std::uint64_t h2 = splitmix_at(key_, 2 * counter + 1);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((h1 >> 11) + 1) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(h2 >> 11) * kScale;        // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace rrt_mppi

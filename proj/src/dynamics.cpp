#include "rrt_mppi/dynamics.hpp"

#include <cmath>

namespace rrt_mppi {

SteeringSingularity::SteeringSingularity()
    : std::domain_error("steering angle at tan() singularity (|phi| >= pi/2 - 1e-6)") {}

void validate(const DynamicsParams& p) {
  if (!(p.wheelbase > 0.0)) throw std::invalid_argument("dynamics.wheelbase must be positive");
  if (!(p.dt > 0.0)) throw std::invalid_argument("dynamics.dt must be positive");
  if (!(p.noise_scale.v >= 0.0) || !(p.noise_scale.omega >= 0.0))
    throw std::invalid_argument("dynamics.noise_scale must be nonnegative");
}

State step(const State& s, const Control& u, const Control& delta, const DynamicsParams& p) {
  auto next = try_step(s, u, delta, p);
  if (!next) throw SteeringSingularity();
  return *next;
}

Control sample_perturbation(const NoiseStream& stream, std::uint64_t i, std::uint64_t j,
                            const DynamicsParams& p) {
  const auto [a, b] = stream.standard_normal_pair(i, j);
  return {p.noise_scale.v * a, p.noise_scale.omega * b};
}

}  // namespace rrt_mppi

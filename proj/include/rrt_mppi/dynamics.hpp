#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "rrt_mppi/geometry.hpp"
#include "rrt_mppi/random.hpp"

namespace rrt_mppi {

/// Unicycle configuration with a steering angle. Angles are stored unwrapped.
struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // heading
  double phi = 0.0;    // steering

  friend bool operator==(const State&, const State&) = default;
  Vec2 position() const { return {x, y}; }
};

/// Linear velocity and steering rate command. Also used for perturbations.
struct Control {
  double v = 0.0;
  double omega = 0.0;

  friend bool operator==(const Control&, const Control&) = default;
  Control operator+(const Control& o) const { return {v + o.v, omega + o.omega}; }
};

struct DynamicsParams {
  double wheelbase = 0.5;
  double dt = 0.05;
  Control noise_scale{1.0, 1.0};  // per-channel std of the plant perturbation

  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

void validate(const DynamicsParams& p);

/// Steering at or beyond the tan() singularity.
class SteeringSingularity : public std::domain_error {
 public:
  SteeringSingularity();
};

constexpr double kSteeringGuard = 1e-6;

inline bool steering_ok(double phi) { return std::abs(phi) < kPi / 2.0 - kSteeringGuard; }

/// One Euler-Maruyama step with the perturbation entering the control channel:
///   s + dt * [cos(theta) (v+dv), sin(theta) (v+dv), tan(phi) (v+dv) / L, omega + dw].
/// Throws SteeringSingularity when |phi| >= pi/2 - 1e-6.
State step(const State& s, const Control& u, const Control& delta, const DynamicsParams& p);

/// Non-throwing variant for hot loops; nullopt at the steering singularity.
inline std::optional<State> try_step(const State& s, const Control& u, const Control& delta,
                                     const DynamicsParams& p) {
  if (!steering_ok(s.phi)) return std::nullopt;
  const double v = u.v + delta.v;
  const double w = u.omega + delta.omega;
  return State{s.x + p.dt * std::cos(s.theta) * v, s.y + p.dt * std::sin(s.theta) * v,
               s.theta + p.dt * std::tan(s.phi) * v / p.wheelbase, s.phi + p.dt * w};
}

/// Plant perturbation delta ~ N(0, diag(noise_scale^2)) for counter (i, j).
Control sample_perturbation(const NoiseStream& stream, std::uint64_t i, std::uint64_t j,
                            const DynamicsParams& p);

}  // namespace rrt_mppi

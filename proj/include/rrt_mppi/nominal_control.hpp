#pragma once

#include <cstddef>

#include "rrt_mppi/dynamics.hpp"
#include "rrt_mppi/rrt.hpp"

namespace rrt_mppi {

struct NominalGains {
  double v_max = 2.0;
  double alpha = 0.5;       // Lyapunov shaping, 1/length^2
  double k_p = 1.0;         // heading proportional gain, 1/s
  std::size_t lookahead = 6;  // waypoints ahead of the nearest one

  friend bool operator==(const NominalGains&, const NominalGains&) = default;
};

void validate(const NominalGains& gains);

/// Saturating Lyapunov speed law and proportional heading law:
///   v = v_max (1 - exp(-alpha e_d^2)),  omega = k_p wrap(bearing - theta).
/// The speed factor e_d / |e_d| is one for a scalar distance, and v -> 0 as e_d -> 0.
Control nominal_control(const State& s, const Vec2& target, const NominalGains& gains);

struct TargetSelection {
  Vec2 target;
  double deviation = 0.0;     // distance to the nearest waypoint
  std::size_t nearest = 0;
};

/// Nearest waypoint (lowest index on ties) and the waypoint `lookahead`
/// positions after it, clamped to the final waypoint.
TargetSelection select_target(const Path& nominal, const State& s, const NominalGains& gains);

}  // namespace rrt_mppi

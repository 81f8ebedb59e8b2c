#include "rrt_mppi/nominal_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrt_mppi {

void validate(const NominalGains& gains) {
  if (!(gains.v_max > 0.0)) throw std::invalid_argument("gains.v_max must be positive");
  if (!(gains.alpha > 0.0)) throw std::invalid_argument("gains.alpha must be positive");
  if (!(gains.k_p > 0.0)) throw std::invalid_argument("gains.k_p must be positive");
}

Control nominal_control(const State& s, const Vec2& target, const NominalGains& gains) {
  const Vec2 e = target - s.position();
  const double e_d2 = squared_norm(e);
  const double bearing = std::atan2(e.y, e.x);
  const double e_theta = wrap_angle(bearing - s.theta);
  return {gains.v_max * (1.0 - std::exp(-gains.alpha * e_d2)), gains.k_p * e_theta};
}

TargetSelection select_target(const Path& nominal, const State& s, const NominalGains& gains) {
  if (nominal.empty()) throw std::invalid_argument("select_target: nominal path is empty");
  const Vec2 p = s.position();
  const std::size_t nearest = nearest_neighbor(nominal.waypoints, p);
  const std::size_t target = std::min(nearest + gains.lookahead, nominal.size() - 1);
  return {nominal.waypoints[target], distance(nominal.waypoints[nearest], p), nearest};
}

}  // namespace rrt_mppi

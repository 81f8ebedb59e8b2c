#include "rrt_mppi/env.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>

namespace rrt_mppi {

namespace {

void validate_shape(const Shape& shape, const std::string& where) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    if (!(c->radius > 0.0) || !std::isfinite(c->radius))
      throw InvalidEnvironment(where + ": circle radius must be positive");
    if (!std::isfinite(c->center.x) || !std::isfinite(c->center.y))
      throw InvalidEnvironment(where + ": circle center must be finite");
  } else {
    const auto& r = std::get<Rect>(shape);
    if (!(r.min.x < r.max.x) || !(r.min.y < r.max.y))
      throw InvalidEnvironment(where + ": rectangle min corner must be strictly below max corner");
  }
}

// Smallest power of two n with length / n <= resolution.
std::uint64_t sample_intervals(double length, double resolution) {
  std::uint64_t n = 1;
  while (length / static_cast<double>(n) > resolution) n *= 2;
  return n;
}

// Endpoint order that makes the sampled points independent of direction.
std::pair<Vec2, Vec2> canonical(const Vec2& a, const Vec2& b) {
  if (std::tie(b.x, b.y) < std::tie(a.x, a.y)) return {b, a};
  return {a, b};
}

template <typename Pred>
bool sampled_segment_free(const Vec2& a, const Vec2& b, double resolution, Pred&& blocked) {
  if (!(resolution > 0.0)) throw std::invalid_argument("segment_free: resolution must be positive");
  const auto [p, q] = canonical(a, b);
  const Vec2 d = q - p;
  const std::uint64_t n = sample_intervals(norm(d), resolution);
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    if (blocked(p + d * s)) return false;
  }
  return true;
}

}  // namespace

bool shape_contains(const Shape& shape, const Vec2& p) {
  return std::visit([&](const auto& s) { return s.contains(p); }, shape);
}

const Shape& Obstacle::shape_at(double t) const {
  const Shape* current = &shape;
  for (const auto& entry : schedule) {
    if (entry.activation_time <= t)
      current = &entry.shape;
    else
      break;
  }
  return *current;
}

void validate(const Environment& env) {
  if (!(env.bounds.min.x < env.bounds.max.x) || !(env.bounds.min.y < env.bounds.max.y))
    throw InvalidEnvironment("bounds: min corner must be strictly below max corner");
  if (!env.bounds.contains(env.start)) throw InvalidEnvironment("start: outside workspace bounds");
  if (!env.bounds.contains(env.goal)) throw InvalidEnvironment("goal: outside workspace bounds");
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    const auto& obs = env.obstacles[i];
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    validate_shape(obs.shape, where);
    for (std::size_t k = 0; k < obs.schedule.size(); ++k) {
      const std::string entry = where + ".schedule[" + std::to_string(k) + "]";
      if (!std::isfinite(obs.schedule[k].activation_time))
        throw InvalidEnvironment(entry + ": activation time must be finite");
      if (k > 0 && !(obs.schedule[k].activation_time > obs.schedule[k - 1].activation_time))
        throw InvalidEnvironment(entry + ": activation times must be strictly increasing");
      validate_shape(obs.schedule[k].shape, entry);
    }
  }
}

std::vector<Shape> active_shapes(double t, const Environment& env) {
  std::vector<Shape> out;
  out.reserve(env.obstacles.size());
  for (const auto& obs : env.obstacles) out.push_back(obs.shape_at(t));
  return out;
}

bool is_in_obstacle(const Vec2& p, double t, const Environment& env) {
  if (!env.bounds.contains(p)) return true;
  for (const auto& obs : env.obstacles)
    if (shape_contains(obs.shape_at(t), p)) return true;
  return false;
}

bool segment_free(const Vec2& a, const Vec2& b, double t, const Environment& env, double resolution) {
  return sampled_segment_free(a, b, resolution,
                              [&](const Vec2& p) { return is_in_obstacle(p, t, env); });
}

ObstacleSnapshot::ObstacleSnapshot(const Environment& env, double t) : bounds_(env.bounds) {
  for (const auto& obs : env.obstacles) {
    const Shape& s = obs.shape_at(t);
    if (const auto* c = std::get_if<Circle>(&s))
      circles_.push_back(*c);
    else
      rects_.push_back(std::get<Rect>(s));
  }
}

bool ObstacleSnapshot::in_collision(const Vec2& p) const {
  if (!bounds_.contains(p)) return true;
  for (const auto& c : circles_)
    if (c.contains(p)) return true;
  for (const auto& r : rects_)
    if (r.contains(p)) return true;
  return false;
}

bool ObstacleSnapshot::segment_free(const Vec2& a, const Vec2& b, double resolution) const {
  return sampled_segment_free(a, b, resolution, [&](const Vec2& p) { return in_collision(p); });
}

Environment schedule_envelope(const Environment& env, double from_t) {
  Environment out = env;
  out.obstacles.clear();
  for (const auto& obs : env.obstacles) {
    out.obstacles.push_back(Obstacle{obs.shape_at(from_t), {}});
    for (const auto& entry : obs.schedule)
      if (entry.activation_time > from_t) out.obstacles.push_back(Obstacle{entry.shape, {}});
  }
  return out;
}

}  // namespace rrt_mppi

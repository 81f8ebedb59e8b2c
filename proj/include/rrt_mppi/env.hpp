#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rrt_mppi/geometry.hpp"

namespace rrt_mppi {

struct Circle {
  Vec2 center;
  double radius = 1.0;

  friend bool operator==(const Circle&, const Circle&) = default;
  bool contains(const Vec2& p) const { return squared_distance(p, center) <= radius * radius; }
};

using Rect = Box;

using Shape = std::variant<Circle, Rect>;

bool shape_contains(const Shape& shape, const Vec2& p);

/// A shape replacing the obstacle's base shape from `activation_time` on.
struct ScheduleEntry {
  double activation_time = 0.0;
  Shape shape;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// Obstacle with a piecewise-constant shape schedule. The shape in effect at
/// time t is the last entry with activation_time <= t, else the base shape.
struct Obstacle {
  Shape shape;
  std::vector<ScheduleEntry> schedule;

  friend bool operator==(const Obstacle&, const Obstacle&) = default;

  const Shape& shape_at(double t) const;
};

struct Environment {
  Box bounds{{0.0, 0.0}, {50.0, 27.0}};
  std::vector<Obstacle> obstacles;
  Vec2 start;
  Vec2 goal;

  friend bool operator==(const Environment&, const Environment&) = default;
};

class InvalidEnvironment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks every Obstacle/Environment invariant; throws InvalidEnvironment
/// naming the offending field. Start/goal collision is not checked here.
void validate(const Environment& env);

std::vector<Shape> active_shapes(double t, const Environment& env);

/// True iff p is inside an obstacle active at t or outside the workspace bounds.
bool is_in_obstacle(const Vec2& p, double t, const Environment& env);

/// Uniformly sampled edge check with spacing <= resolution, endpoints
/// included. The sample count is a power of two so that halving the
/// resolution only adds samples.
bool segment_free(const Vec2& a, const Vec2& b, double t, const Environment& env,
                  double resolution = 0.1);

/// Obstacle set resolved at a fixed time; the fast path for repeated queries.
class ObstacleSnapshot {
 public:
  ObstacleSnapshot() = default;
  ObstacleSnapshot(const Environment& env, double t);

  bool in_collision(const Vec2& p) const;
  bool segment_free(const Vec2& a, const Vec2& b, double resolution) const;

 private:
  Box bounds_;
  std::vector<Circle> circles_;
  std::vector<Rect> rects_;
};

/// Static environment holding every shape any obstacle takes at some time
/// >= from_t. A path free in the envelope is free for the rest of the run.
Environment schedule_envelope(const Environment& env, double from_t);

}  // namespace rrt_mppi

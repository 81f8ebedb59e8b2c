#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrt_mppi/env.hpp"
#include "rrt_mppi/geometry.hpp"

namespace rrt_mppi {

struct RrtConfig {
  double gamma = 0.5;               // steer radius and goal-capture radius
  std::uint64_t max_iters = 20000;
  double goal_bias = 0.05;
  double resolution = 0.1;          // edge collision-check spacing
  std::uint64_t seed = 0;

  friend bool operator==(const RrtConfig&, const RrtConfig&) = default;
};

void validate(const RrtConfig& cfg);

struct Path {
  std::vector<Vec2> waypoints;

  friend bool operator==(const Path&, const Path&) = default;
  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
};

/// Vertex store with parent links; vertex 0 is the root.
struct Tree {
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  std::vector<Vec2> vertices;
  std::vector<std::size_t> parent;

  std::size_t add(const Vec2& p, std::size_t parent_index);
  std::size_t size() const { return vertices.size(); }
  /// Root-to-v path by walking parent links.
  Path extract_path(std::size_t v) const;
};

/// Nearest-neighbour index: linear scan up to kLinearLimit points, uniform
/// grid buckets above. Ties resolve to the lowest index.
class PointIndex {
 public:
  static constexpr std::size_t kLinearLimit = 4096;

  explicit PointIndex(const Box& bounds, double cell_size = 1.0);

  std::size_t insert(const Vec2& p);
  std::size_t nearest(const Vec2& q) const;
  std::size_t size() const { return points_.size(); }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }

 private:
  void bucket(std::size_t i);
  std::size_t cell_x(double x) const;
  std::size_t cell_y(double y) const;

  Box bounds_;
  double cell_;
  std::size_t nx_;
  std::size_t ny_;
  std::vector<Vec2> points_;
  std::vector<std::vector<std::uint32_t>> cells_;
  bool gridded_ = false;
};

class EmptyPointSet : public std::invalid_argument {
 public:
  EmptyPointSet() : std::invalid_argument("nearest_neighbor: empty point set") {}
};

class StartInCollision : public std::invalid_argument {
 public:
  StartInCollision() : std::invalid_argument("rrt: start position is in collision") {}
};

/// Goal with probability goal_bias, otherwise uniform over the bounds.
Vec2 sample_state(std::mt19937_64& rng, const Environment& env, double goal_bias);

/// Exhaustive scan; lowest index wins ties. Throws EmptyPointSet.
std::size_t nearest_neighbor(std::span<const Vec2> points, const Vec2& q);

/// `toward` if within gamma of `from`, otherwise the point at distance gamma
/// along the ray from -> toward.
Vec2 steer(const Vec2& from, const Vec2& toward, double gamma);

struct RrtResult {
  Tree tree;
  std::optional<Path> path;
  std::uint64_t iterations = 0;
};

/// Goal-directed RRT from env.start against obstacles frozen at time t.
/// Throws StartInCollision.
RrtResult plan(const Environment& env, const RrtConfig& cfg, double t);

struct ReplanResult {
  Tree tree;  // rooted at the current position
  std::optional<Path> path;
  /// Index into the nominal path where the replanned branch rejoins it;
  /// empty when the path ends at the goal (or on failure).
  std::optional<std::size_t> junction;
  std::uint64_t iterations = 0;
};

/// Replanning RRT: grows a tree from `current` until a new vertex comes
/// within gamma of the goal or of a nominal waypoint (with a free edge).
ReplanResult replan(const Path& nominal, const Vec2& current, const Environment& env,
                    const RrtConfig& cfg, double t);

/// Replanned prefix followed by the nominal suffix after the junction.
Path splice(const Path& replanned, std::optional<std::size_t> junction, const Path& nominal);

}  // namespace rrt_mppi

#include "rrt_mppi/rrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rrt_mppi {

void validate(const RrtConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("rrt.gamma must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("rrt.max_iters must be at least 1");
  if (!(cfg.goal_bias >= 0.0 && cfg.goal_bias <= 1.0))
    throw std::invalid_argument("rrt.goal_bias must lie in [0, 1]");
  if (!(cfg.resolution > 0.0)) throw std::invalid_argument("rrt.resolution must be positive");
}

std::size_t Tree::add(const Vec2& p, std::size_t parent_index) {
  vertices.push_back(p);
  parent.push_back(parent_index);
  return vertices.size() - 1;
}

Path Tree::extract_path(std::size_t v) const {
  Path path;
  for (std::size_t cur = v; cur != kNoParent; cur = parent[cur]) path.waypoints.push_back(vertices[cur]);
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

// ---------------------------------------------------------------------------
// PointIndex

PointIndex::PointIndex(const Box& bounds, double cell_size)
    : bounds_(bounds),
      cell_(cell_size),
      nx_(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.width() / cell_size)))),
      ny_(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.height() / cell_size)))) {}

std::size_t PointIndex::cell_x(double x) const {
  const double c = std::floor((x - bounds_.min.x) / cell_);
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
}

std::size_t PointIndex::cell_y(double y) const {
  const double c = std::floor((y - bounds_.min.y) / cell_);
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(ny_ - 1)));
}

void PointIndex::bucket(std::size_t i) {
  const Vec2& p = points_[i];
  cells_[cell_y(p.y) * nx_ + cell_x(p.x)].push_back(static_cast<std::uint32_t>(i));
}

std::size_t PointIndex::insert(const Vec2& p) {
  points_.push_back(p);
  const std::size_t i = points_.size() - 1;
  if (gridded_) {
    bucket(i);
  } else if (points_.size() > kLinearLimit) {
    cells_.assign(nx_ * ny_, {});
    for (std::size_t k = 0; k < points_.size(); ++k) bucket(k);
    gridded_ = true;
  }
  return i;
}

std::size_t PointIndex::nearest(const Vec2& q) const {
  if (!gridded_) return nearest_neighbor(points_, q);

  const auto cx = static_cast<std::ptrdiff_t>(cell_x(q.x));
  const auto cy = static_cast<std::ptrdiff_t>(cell_y(q.y));
  const auto nx = static_cast<std::ptrdiff_t>(nx_);
  const auto ny = static_cast<std::ptrdiff_t>(ny_);
  const std::ptrdiff_t max_ring = std::max(nx, ny);

  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  auto visit = [&](std::ptrdiff_t ix, std::ptrdiff_t iy) {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return;
    for (std::uint32_t idx : cells_[static_cast<std::size_t>(iy * nx + ix)]) {
      const double d2 = squared_distance(points_[idx], q);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
  };

  for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
    if (ring == 0) {
      visit(cx, cy);
    } else {
      for (std::ptrdiff_t ix = cx - ring; ix <= cx + ring; ++ix) {
        visit(ix, cy - ring);
        visit(ix, cy + ring);
      }
      for (std::ptrdiff_t iy = cy - ring + 1; iy <= cy + ring - 1; ++iy) {
        visit(cx - ring, iy);
        visit(cx + ring, iy);
      }
    }
    // Unvisited points lie at least ring * cell away.
    const double reach = static_cast<double>(ring) * cell_;
    if (best != std::numeric_limits<std::size_t>::max() && best_d2 < reach * reach) break;
  }
  return best;
}

// ---------------------------------------------------------------------------

Vec2 sample_state(std::mt19937_64& rng, const Environment& env, double goal_bias) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < goal_bias) return env.goal;
  std::uniform_real_distribution<double> ux(env.bounds.min.x, env.bounds.max.x);
  std::uniform_real_distribution<double> uy(env.bounds.min.y, env.bounds.max.y);
  const double x = ux(rng);
  return {x, uy(rng)};
}

std::size_t nearest_neighbor(std::span<const Vec2> points, const Vec2& q) {
  if (points.empty()) throw EmptyPointSet();
  std::size_t best = 0;
  double best_d2 = squared_distance(points[0], q);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d2 = squared_distance(points[i], q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

Vec2 steer(const Vec2& from, const Vec2& toward, double gamma) {
  const Vec2 d = toward - from;
  const double len = norm(d);
  if (len <= gamma) return toward;
  return from + d * (gamma / len);
}

RrtResult plan(const Environment& env, const RrtConfig& cfg, double t) {
  validate(cfg);
  const ObstacleSnapshot obstacles(env, t);
  if (obstacles.in_collision(env.start)) throw StartInCollision();

  RrtResult result;
  PointIndex index(env.bounds, 2.0 * cfg.gamma);
  result.tree.add(env.start, Tree::kNoParent);
  index.insert(env.start);

  std::mt19937_64 rng(cfg.seed);
  for (std::uint64_t iter = 0; iter < cfg.max_iters; ++iter) {
    result.iterations = iter + 1;
    const Vec2 sample = sample_state(rng, env, cfg.goal_bias);
    const std::size_t near = index.nearest(sample);
    const Vec2 s = steer(result.tree.vertices[near], sample, cfg.gamma);
    if (s == result.tree.vertices[near]) continue;
    if (!obstacles.segment_free(result.tree.vertices[near], s, cfg.resolution)) continue;

    const std::size_t v = result.tree.add(s, near);
    index.insert(s);
    if (distance(s, env.goal) < cfg.gamma && obstacles.segment_free(s, env.goal, cfg.resolution)) {
      const std::size_t g = s == env.goal ? v : result.tree.add(env.goal, v);
      result.path = result.tree.extract_path(g);
      return result;
    }
  }
  return result;
}

ReplanResult replan(const Path& nominal, const Vec2& current, const Environment& env,
                    const RrtConfig& cfg, double t) {
  validate(cfg);
  if (nominal.empty()) throw std::invalid_argument("replan: nominal path is empty");
  const ObstacleSnapshot obstacles(env, t);
  if (obstacles.in_collision(current)) throw StartInCollision();

  ReplanResult result;
  result.tree.add(current, Tree::kNoParent);

  PointIndex nominal_index(env.bounds, 2.0 * cfg.gamma);
  for (const auto& w : nominal.waypoints) nominal_index.insert(w);
  PointIndex growing(env.bounds, 2.0 * cfg.gamma);
  growing.insert(current);

  // Closes the branch ending at vertex v if it can reach the goal or rejoin
  // the nominal path through a free edge shorter than gamma.
  auto try_finish = [&](std::size_t v) {
    const Vec2& s = result.tree.vertices[v];
    if (distance(s, env.goal) < cfg.gamma && obstacles.segment_free(s, env.goal, cfg.resolution)) {
      const std::size_t g = s == env.goal ? v : result.tree.add(env.goal, v);
      result.path = result.tree.extract_path(g);
      return true;
    }
    const std::size_t near = nominal_index.nearest(s);
    const Vec2& w = nominal.waypoints[near];
    if (distance(s, w) < cfg.gamma && obstacles.segment_free(s, w, cfg.resolution)) {
      const std::size_t j = s == w ? v : result.tree.add(w, v);
      result.path = result.tree.extract_path(j);
      result.junction = near;
      return true;
    }
    return false;
  };

  if (try_finish(0)) return result;

  std::mt19937_64 rng(cfg.seed);
  for (std::uint64_t iter = 0; iter < cfg.max_iters; ++iter) {
    result.iterations = iter + 1;
    const Vec2 sample = sample_state(rng, env, cfg.goal_bias);
    const std::size_t near = growing.nearest(sample);
    const Vec2 s = steer(result.tree.vertices[near], sample, cfg.gamma);
    if (s == result.tree.vertices[near]) continue;
    if (!obstacles.segment_free(result.tree.vertices[near], s, cfg.resolution)) continue;

    const std::size_t v = result.tree.add(s, near);
    growing.insert(s);
    if (try_finish(v)) return result;
  }
  return result;
}

Path splice(const Path& replanned, std::optional<std::size_t> junction, const Path& nominal) {
  Path out = replanned;
  if (junction) {
    for (std::size_t k = *junction + 1; k < nominal.waypoints.size(); ++k)
      out.waypoints.push_back(nominal.waypoints[k]);
  }
  return out;
}

}  // namespace rrt_mppi

#include "rrt_mppi/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace rrt_mppi {

void validate(const MppiConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("mppi.samples must be at least 1");
  if (cfg.horizon < 1) throw std::invalid_argument("mppi.horizon must be at least 1");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("mppi.lambda must be positive");
  if (!(cfg.sigma.v >= 0.0) || !(cfg.sigma.omega >= 0.0))
    throw std::invalid_argument("mppi.sigma must be nonnegative");
  if (!(cfg.obstacle_penalty >= 0.0)) throw std::invalid_argument("mppi.obstacle_penalty must be nonnegative");
  if (!(cfg.terminal_weight >= 0.0)) throw std::invalid_argument("mppi.terminal_weight must be nonnegative");
  const auto& r = cfg.control_penalty;
  // 2x2 symmetric PSD: nonnegative diagonal and determinant.
  if (r[1] != r[2] || r[0] < 0.0 || r[3] < 0.0 || r[0] * r[3] - r[1] * r[2] < 0.0)
    throw std::invalid_argument("mppi.control_penalty must be symmetric positive semidefinite");
  if (cfg.threads < 1) throw std::invalid_argument("mppi.threads must be at least 1");
}

namespace {

double control_cost(const Control& u, const std::array<double, 4>& r) {
  return 0.5 * (u.v * (r[0] * u.v + r[1] * u.omega) + u.omega * (r[2] * u.v + r[3] * u.omega));
}

bool has_control_penalty(const std::array<double, 4>& r) {
  return r[0] != 0.0 || r[1] != 0.0 || r[2] != 0.0 || r[3] != 0.0;
}

struct RolloutContext {
  RolloutContext(double t0, std::uint64_t epoch, const Environment& env, const MppiConfig& cfg,
                 const DynamicsParams& dynamics)
      : goal(env.goal),
        cfg(cfg),
        dynamics(dynamics),
        noise(cfg.seed, StreamPurpose::kRollout, epoch),
        penalize_controls(has_control_penalty(cfg.control_penalty)) {
    snapshots.reserve(cfg.horizon + 1);
    for (std::size_t j = 0; j <= cfg.horizon; ++j) {
      const double t = cfg.freeze_obstacles ? t0 : t0 + static_cast<double>(j) * dynamics.dt;
      snapshots.emplace_back(env, t);
    }
  }

  double state_cost(const State& s, std::size_t j) const {
    const Vec2 d = s.position() - goal;
    double c = d.x * d.x + d.y * d.y;
    if (snapshots[j].in_collision(s.position())) c += cfg.obstacle_penalty;
    return c;
  }

  Vec2 goal;
  const MppiConfig& cfg;
  const DynamicsParams& dynamics;
  NoiseStream noise;
  bool penalize_controls;
  std::vector<ObstacleSnapshot> snapshots;  // index j -> obstacles at step j
};

// Simulates rollout i, writing T controls (and optionally T states). Returns S(tau_i).
double simulate(const RolloutContext& ctx, const State& initial, std::span<const Control> mean,
                std::uint64_t i, Control* controls, State* states) {
  const std::size_t horizon = mean.size();
  const Control zero{};
  State x = initial;
  double cost = 0.0;
  bool singular = false;
  for (std::size_t j = 0; j < horizon; ++j) {
    const auto [a, b] = ctx.noise.standard_normal_pair(i, j);
    const Control u{mean[j].v + ctx.cfg.sigma.v * a, mean[j].omega + ctx.cfg.sigma.omega * b};
    controls[j] = u;
    if (!singular) {
      cost += ctx.state_cost(x, j);
      if (ctx.penalize_controls) cost += control_cost(u, ctx.cfg.control_penalty);
      if (auto next = try_step(x, u, zero, ctx.dynamics))
        x = *next;
      else
        singular = true;
    }
    if (states) states[j] = x;
  }
  if (singular) return kSentinelCost;
  cost += ctx.cfg.terminal_weight * ctx.state_cost(x, horizon);
  if (!std::isfinite(cost) || cost > kSentinelCost) return kSentinelCost;
  return cost;
}

// u_j = ref_j + sum_i w_i (u_ij - ref_j) / sum_i w_i, clamped to the sample
// range. Summation runs in index order.
template <typename ControlAt>
MeanSequence weighted_update(std::span<const Control> ref, std::span<const double> w,
                             ControlAt&& control_at) {
  const std::size_t horizon = ref.size();
  std::vector<double> acc_v(horizon, 0.0), acc_w(horizon, 0.0);
  std::vector<Control> lo(ref.begin(), ref.end()), hi(ref.begin(), ref.end());
  double total = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += w[i];
    for (std::size_t j = 0; j < horizon; ++j) {
      const Control& u = control_at(i, j);
      acc_v[j] += w[i] * (u.v - ref[j].v);
      acc_w[j] += w[i] * (u.omega - ref[j].omega);
      if (first) {
        lo[j] = hi[j] = u;
      } else {
        lo[j].v = std::min(lo[j].v, u.v);
        lo[j].omega = std::min(lo[j].omega, u.omega);
        hi[j].v = std::max(hi[j].v, u.v);
        hi[j].omega = std::max(hi[j].omega, u.omega);
      }
    }
    first = false;
  }
  MeanSequence out(horizon);
  for (std::size_t j = 0; j < horizon; ++j) {
    out[j].v = std::clamp(ref[j].v + acc_v[j] / total, lo[j].v, hi[j].v);
    out[j].omega = std::clamp(ref[j].omega + acc_w[j] / total, lo[j].omega, hi[j].omega);
  }
  return out;
}

}  // namespace

double running_cost(const State& s, const Control& u, double t, const Environment& env,
                    const MppiConfig& cfg) {
  double c = squared_distance(s.position(), env.goal);
  if (is_in_obstacle(s.position(), t, env)) c += cfg.obstacle_penalty;
  return c + control_cost(u, cfg.control_penalty);
}

double terminal_cost(const State& s, double t, const Environment& env, const MppiConfig& cfg) {
  double c = squared_distance(s.position(), env.goal);
  if (is_in_obstacle(s.position(), t, env)) c += cfg.obstacle_penalty;
  return cfg.terminal_weight * c;
}

Rollout rollout(const State& initial, std::span<const Control> mean, std::uint64_t i, double t0,
                std::uint64_t epoch, const Environment& env, const MppiConfig& cfg,
                const DynamicsParams& dynamics) {
  validate(cfg);
  if (mean.size() != cfg.horizon) throw std::invalid_argument("rollout: mean length must equal the horizon");
  const RolloutContext ctx(t0, epoch, env, cfg, dynamics);
  Rollout r;
  r.controls.resize(cfg.horizon);
  r.states.resize(cfg.horizon);
  r.cost = simulate(ctx, initial, mean, i, r.controls.data(), r.states.data());
  return r;
}

std::vector<double> weights(std::span<const double> costs, double lambda) {
  if (costs.empty()) throw std::invalid_argument("weights: empty cost list");
  if (!(lambda > 0.0)) throw std::invalid_argument("weights: lambda must be positive");
  const double lo = *std::min_element(costs.begin(), costs.end());
  std::vector<double> w(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) w[i] = std::exp(-(costs[i] - lo) / lambda);
  return w;
}

MeanSequence update_controls(std::span<const Rollout> rollouts) {
  if (rollouts.empty()) throw std::invalid_argument("update_controls: no rollouts");
  if (std::all_of(rollouts.begin(), rollouts.end(),
                  [](const Rollout& r) { return r.cost >= kSentinelCost; }))
    throw DegenerateSamples();
  const std::size_t horizon = rollouts.front().controls.size();
  for (const auto& r : rollouts)
    if (r.controls.size() != horizon) throw std::invalid_argument("update_controls: ragged rollouts");
  std::vector<double> w(rollouts.size());
  for (std::size_t i = 0; i < rollouts.size(); ++i) w[i] = rollouts[i].weight;
  return weighted_update(rollouts.front().controls, w,
                         [&](std::size_t i, std::size_t j) -> const Control& { return rollouts[i].controls[j]; });
}

MppiStepResult mppi_step(const State& initial, std::span<const Control> mean, double t0,
                         std::uint64_t epoch, const Environment& env, const MppiConfig& cfg,
                         const DynamicsParams& dynamics, bool keep_costs) {
  validate(cfg);
  if (mean.size() != cfg.horizon) throw std::invalid_argument("mppi_step: mean length must equal the horizon");
  const std::size_t k = cfg.samples;
  const std::size_t horizon = cfg.horizon;
  const RolloutContext ctx(t0, epoch, env, cfg, dynamics);

  std::vector<double> costs(k);
  std::vector<Control> controls(k * horizon);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      costs[i] = simulate(ctx, initial, mean, i, controls.data() + i * horizon, nullptr);
  };

  const std::size_t lanes = std::min(cfg.threads, k);
  if (lanes <= 1) {
    run_range(0, k);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(lanes);
    for (std::size_t lane = 0; lane < lanes; ++lane)
      workers.emplace_back(run_range, lane * k / lanes, (lane + 1) * k / lanes);
  }

  MppiDiagnostics diag;
  diag.sentinel_count = static_cast<std::size_t>(
      std::count_if(costs.begin(), costs.end(), [](double c) { return c >= kSentinelCost; }));
  if (diag.sentinel_count == k) throw DegenerateSamples();

  const std::vector<double> w = weights(costs, cfg.lambda);
  double sum_w = 0.0, sum_w2 = 0.0, sum_cost = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum_w += w[i];
    sum_w2 += w[i] * w[i];
    sum_cost += costs[i];
  }
  diag.min_cost = *std::min_element(costs.begin(), costs.end());
  diag.mean_cost = sum_cost / static_cast<double>(k);
  diag.ess = sum_w * sum_w / sum_w2;
  diag.mean_weight = sum_w / static_cast<double>(k);

  MppiStepResult result;
  result.updated = weighted_update(mean, w, [&](std::size_t i, std::size_t j) -> const Control& {
    return controls[i * horizon + j];
  });
  result.executed = result.updated.front();
  result.next_mean.assign(result.updated.begin() + 1, result.updated.end());
  result.next_mean.push_back(result.updated.back());
  if (keep_costs) diag.costs = std::move(costs);
  result.diagnostics = std::move(diag);
  return result;
}

}  // namespace rrt_mppi

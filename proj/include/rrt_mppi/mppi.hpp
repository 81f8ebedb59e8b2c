#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrt_mppi/dynamics.hpp"
#include "rrt_mppi/env.hpp"

namespace rrt_mppi {

struct MppiConfig {
  std::size_t samples = 10000;  // K
  std::size_t horizon = 20;     // T
  double lambda = 1.0;
  Control sigma{1.0, 1.0};      // per-channel perturbation std
  /// Row-major 2x2 control penalty R in 0.5 u^T R u.
  std::array<double, 4> control_penalty{0.0, 0.0, 0.0, 0.0};
  double obstacle_penalty = 1000.0;
  double terminal_weight = 1.0;
  /// Evaluate every rollout step against the obstacles at t0 instead of t0 + j dt.
  bool freeze_obstacles = false;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const MppiConfig&, const MppiConfig&) = default;
};

void validate(const MppiConfig& cfg);

/// Cost assigned to rollouts that hit the steering singularity.
constexpr double kSentinelCost = 1e9;

using MeanSequence = std::vector<Control>;

struct Rollout {
  std::vector<Control> controls;  // T sampled controls u_{i,j}
  std::vector<State> states;      // T successor states x_{i,1..T}
  double cost = 0.0;
  double weight = 0.0;
};

class DegenerateSamples : public std::runtime_error {
 public:
  DegenerateSamples() : std::runtime_error("mppi: every rollout carries the sentinel cost") {}
};

/// |p - goal|^2 + obstacle_penalty * [p in obstacle at t] + 0.5 u^T R u.
double running_cost(const State& s, const Control& u, double t, const Environment& env,
                    const MppiConfig& cfg);

/// terminal_weight * (|p - goal|^2 + obstacle_penalty * [p in obstacle at t]).
double terminal_cost(const State& s, double t, const Environment& env, const MppiConfig& cfg);

/// Sample i of the rollout batch identified by `epoch`. Weight is left at 0.
Rollout rollout(const State& initial, std::span<const Control> mean, std::uint64_t i, double t0,
                std::uint64_t epoch, const Environment& env, const MppiConfig& cfg,
                const DynamicsParams& dynamics);

/// exp(-(S_i - min S) / lambda).
std::vector<double> weights(std::span<const double> costs, double lambda);

/// Per-step weighted average of the rollout controls using Rollout::weight.
/// Throws DegenerateSamples when every rollout carries the sentinel cost.
MeanSequence update_controls(std::span<const Rollout> rollouts);

struct MppiDiagnostics {
  double min_cost = 0.0;
  double mean_cost = 0.0;
  double ess = 0.0;          // (sum w)^2 / sum w^2
  double mean_weight = 0.0;  // sample mean of the min-shifted weights
  std::size_t sentinel_count = 0;
  std::vector<double> costs;  // filled when keep_costs is requested
};

struct MppiStepResult {
  Control executed;
  MeanSequence updated;    // full weighted-average sequence
  MeanSequence next_mean;  // updated shifted left, last element repeated
  MppiDiagnostics diagnostics;
};

/// One receding-horizon iteration: K rollouts (possibly on cfg.threads lanes),
/// ordered reduction, control update. `epoch` selects the noise substream.
MppiStepResult mppi_step(const State& initial, std::span<const Control> mean, double t0,
                         std::uint64_t epoch, const Environment& env, const MppiConfig& cfg,
                         const DynamicsParams& dynamics, bool keep_costs = false);

}  // namespace rrt_mppi

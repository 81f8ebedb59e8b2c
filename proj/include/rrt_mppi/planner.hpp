#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rrt_mppi/dynamics.hpp"
#include "rrt_mppi/env.hpp"
#include "rrt_mppi/mppi.hpp"
#include "rrt_mppi/nominal_control.hpp"
#include "rrt_mppi/rrt.hpp"

namespace rrt_mppi {

struct PlannerConfig {
  double replan_radius = 6.0;
  RrtConfig rrt;
  MppiConfig mppi;
  NominalGains gains;
  DynamicsParams dynamics;
  double goal_tolerance = 1.0;
  std::size_t max_steps = 600;
  /// Plan the offline path against every shape the obstacle schedule will
  /// take (schedule_envelope) instead of the shapes at t = 0.
  bool offline_plan_over_schedule = true;

  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

void validate(const PlannerConfig& cfg);

struct Mode {
  enum class Kind { kRrtMppi, kFixedMean };
  Kind kind = Kind::kRrtMppi;
  Control fixed_mean{1.0, 0.0};

  friend bool operator==(const Mode&, const Mode&) = default;

  static Mode rrt_mppi() { return {}; }
  static Mode fixed(Control mu) { return {Kind::kFixedMean, mu}; }
};

/// "rrt-mppi" or "fixed:<v>,<omega>". Throws std::invalid_argument.
Mode parse_mode(const std::string& text);
std::string to_string(const Mode& mode);

enum class Outcome { kReachedGoal, kCollided, kBudgetExhausted, kPlanningFailed, kSteeringLimit };

std::string to_string(Outcome outcome);

/// True iff deviation >= radius.
bool replan_trigger(double deviation, double radius);

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;          // time at the pre-step state
  State state;             // pre-step state
  Control executed;
  Control perturbation;    // plant noise applied with `executed`
  double deviation = std::numeric_limits<double>::quiet_NaN();
  bool replanned = false;
  Control mean_first;      // first element of the horizon mean
  Control mean_average;    // horizon-average of the mean sequence
  Control mean_variance;   // within-horizon variance of the mean sequence
  MppiDiagnostics diagnostics;
};

struct ReplanEvent {
  std::size_t step = 0;
  double t = 0.0;
  double deviation = 0.0;
  bool succeeded = false;
  Path old_path;
  Path new_path;
  Tree tree;
};

struct PhaseTiming {
  double offline_rrt_ms = 0.0;
  double mppi_ms = 0.0;
  double replan_ms = 0.0;
  double total_ms = 0.0;
};

struct RunRecord {
  Mode mode;
  std::uint64_t seed = 0;
  State initial;
  std::vector<StepRecord> steps;
  State final_state;
  double final_time = 0.0;
  Outcome outcome = Outcome::kBudgetExhausted;
  std::optional<Path> offline_path;
  Tree offline_tree;
  Path active_path;
  std::vector<ReplanEvent> replans;
  PhaseTiming timing;
  std::size_t collision_steps = 0;
  std::string message;
};

struct RunOptions {
  /// Keep per-step rollout cost vectors (for sample-size estimates).
  std::vector<std::size_t> keep_costs_at_steps;
  /// Keep the search tree of every replan event.
  bool keep_replan_trees = false;
};

/// Closed-loop run from start state `start` toward env.goal.
RunRecord run(const Environment& env, const State& start, const PlannerConfig& cfg, const Mode& mode,
              std::uint64_t seed, const RunOptions& options = {});

/// Nominal law simulated forward along the horizon from `s` (no noise).
MeanSequence nominal_mean_sequence(const Path& nominal, const State& s, const NominalGains& gains,
                                   const DynamicsParams& dynamics, std::size_t horizon);

}  // namespace rrt_mppi

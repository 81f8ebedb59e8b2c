#include "rrt_mppi/planner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <stdexcept>

namespace rrt_mppi {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) + 0x632be59bd9b4e019ULL * (tag + 1));
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("invalid number '" + text + "' in " + context);
  return value;
}

}  // namespace

void validate(const PlannerConfig& cfg) {
  if (!(cfg.replan_radius > 0.0)) throw std::invalid_argument("planner.replan_radius must be positive");
  if (!(cfg.goal_tolerance > 0.0)) throw std::invalid_argument("planner.goal_tolerance must be positive");
  validate(cfg.rrt);
  validate(cfg.mppi);
  validate(cfg.gains);
  validate(cfg.dynamics);
}

Mode parse_mode(const std::string& text) {
  if (text == "rrt-mppi") return Mode::rrt_mppi();
  const std::string prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string body = text.substr(prefix.size());
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("mode '" + text + "': expected fixed:<v>,<omega>");
    return Mode::fixed({parse_number(body.substr(0, comma), "mode"), parse_number(body.substr(comma + 1), "mode")});
  }
  throw std::invalid_argument("unknown mode '" + text + "' (expected rrt-mppi or fixed:<v>,<omega>)");
}

std::string to_string(const Mode& mode) {
  if (mode.kind == Mode::Kind::kRrtMppi) return "rrt-mppi";
  return "fixed:" + format_number(mode.fixed_mean.v) + "," + format_number(mode.fixed_mean.omega);
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kReachedGoal: return "reached-goal";
    case Outcome::kCollided: return "collided";
    case Outcome::kBudgetExhausted: return "budget-exhausted";
    case Outcome::kPlanningFailed: return "planning-failed";
    case Outcome::kSteeringLimit: return "steering-limit";
  }
  return "unknown";
}

bool replan_trigger(double deviation, double radius) { return deviation >= radius; }

MeanSequence nominal_mean_sequence(const Path& nominal, const State& s, const NominalGains& gains,
                                   const DynamicsParams& dynamics, std::size_t horizon) {
  MeanSequence mean;
  mean.reserve(horizon);
  State predicted = s;
  for (std::size_t j = 0; j < horizon; ++j) {
    const auto sel = select_target(nominal, predicted, gains);
    const Control u = nominal_control(predicted, sel.target, gains);
    mean.push_back(u);
    if (auto next = try_step(predicted, u, Control{}, dynamics)) predicted = *next;
  }
  return mean;
}

RunRecord run(const Environment& env, const State& start, const PlannerConfig& cfg, const Mode& mode,
              std::uint64_t seed, const RunOptions& options) {
  validate(cfg);
  const auto run_started = Clock::now();
  const double dt = cfg.dynamics.dt;

  RunRecord rec;
  rec.mode = mode;
  rec.seed = seed;
  rec.initial = start;
  rec.final_state = start;

  if (is_in_obstacle(start.position(), 0.0, env)) throw StartInCollision();
  if (distance(start.position(), env.goal) <= cfg.goal_tolerance) {
    rec.outcome = Outcome::kReachedGoal;
    rec.timing.total_ms = elapsed_ms(run_started);
    return rec;
  }

  MppiConfig mppi_cfg = cfg.mppi;
  mppi_cfg.seed = derive_seed(seed, 0);

  const bool guided = mode.kind == Mode::Kind::kRrtMppi;
  if (guided) {
    RrtConfig rrt_cfg = cfg.rrt;
    rrt_cfg.seed = derive_seed(seed, 1);
    Environment planning_env = cfg.offline_plan_over_schedule ? schedule_envelope(env, 0.0) : env;
    planning_env.start = start.position();
    const auto started = Clock::now();
    RrtResult offline = plan(planning_env, rrt_cfg, 0.0);
    rec.timing.offline_rrt_ms = elapsed_ms(started);
    rec.offline_tree = std::move(offline.tree);
    if (!offline.path) {
      rec.outcome = Outcome::kPlanningFailed;
      rec.message = "offline RRT found no path within max_iters";
      rec.timing.total_ms = elapsed_ms(run_started);
      return rec;
    }
    rec.offline_path = offline.path;
    rec.active_path = *offline.path;
  }

  const NoiseStream plant_noise(seed, StreamPurpose::kPlant, 0);
  const MeanSequence fixed_mean(cfg.mppi.horizon, mode.fixed_mean);
  State state = start;
  double t = 0.0;
  rec.outcome = Outcome::kBudgetExhausted;

  for (std::size_t k = 0; k < cfg.max_steps; ++k) {
    StepRecord sr;
    sr.step = k;
    sr.t = t;
    sr.state = state;

    MeanSequence mean;
    if (guided) {
      auto sel = select_target(rec.active_path, state, cfg.gains);
      sr.deviation = sel.deviation;
      if (replan_trigger(sel.deviation, cfg.replan_radius)) {
        sr.replanned = true;
        RrtConfig rrt_cfg = cfg.rrt;
        rrt_cfg.seed = derive_seed(seed, 2 + rec.replans.size());
        const auto started = Clock::now();
        ReplanResult rr = replan(rec.active_path, state.position(), env, rrt_cfg, t);
        rec.timing.replan_ms += elapsed_ms(started);
        ReplanEvent ev;
        ev.step = k;
        ev.t = t;
        ev.deviation = sel.deviation;
        ev.old_path = rec.active_path;
        ev.succeeded = rr.path.has_value();
        if (rr.path) rec.active_path = splice(*rr.path, rr.junction, rec.active_path);
        ev.new_path = rec.active_path;
        if (options.keep_replan_trees) ev.tree = std::move(rr.tree);
        rec.replans.push_back(std::move(ev));
      }
      mean = nominal_mean_sequence(rec.active_path, state, cfg.gains, cfg.dynamics, cfg.mppi.horizon);
    } else {
      mean = fixed_mean;
    }

    sr.mean_first = mean.front();
    for (const auto& u : mean) {
      sr.mean_average.v += u.v;
      sr.mean_average.omega += u.omega;
    }
    const double horizon = static_cast<double>(mean.size());
    sr.mean_average.v /= horizon;
    sr.mean_average.omega /= horizon;
    for (const auto& u : mean) {
      sr.mean_variance.v += (u.v - sr.mean_average.v) * (u.v - sr.mean_average.v) / horizon;
      sr.mean_variance.omega += (u.omega - sr.mean_average.omega) * (u.omega - sr.mean_average.omega) / horizon;
    }

    const bool keep = std::find(options.keep_costs_at_steps.begin(), options.keep_costs_at_steps.end(), k) !=
                      options.keep_costs_at_steps.end();
    MppiStepResult step_result;
    const auto started = Clock::now();
    try {
      step_result = mppi_step(state, mean, t, k, env, mppi_cfg, cfg.dynamics, keep);
    } catch (const DegenerateSamples&) {
      rec.timing.mppi_ms += elapsed_ms(started);
      rec.steps.push_back(std::move(sr));
      rec.outcome = Outcome::kSteeringLimit;
      rec.message = "every rollout hit the steering singularity";
      break;
    }
    rec.timing.mppi_ms += elapsed_ms(started);
    sr.executed = step_result.executed;
    sr.diagnostics = std::move(step_result.diagnostics);
    sr.perturbation = sample_perturbation(plant_noise, k, 0, cfg.dynamics);

    const auto next = try_step(state, sr.executed, sr.perturbation, cfg.dynamics);
    rec.steps.push_back(std::move(sr));
    if (!next) {
      rec.outcome = Outcome::kSteeringLimit;
      rec.message = "plant steering angle reached the singularity";
      break;
    }
    state = *next;
    t = static_cast<double>(k + 1) * dt;
    if (is_in_obstacle(state.position(), t, env)) {
      ++rec.collision_steps;
      rec.outcome = Outcome::kCollided;
      break;
    }
    if (distance(state.position(), env.goal) <= cfg.goal_tolerance) {
      rec.outcome = Outcome::kReachedGoal;
      break;
    }
  }

  rec.final_state = state;
  rec.final_time = t;
  rec.timing.total_ms = elapsed_ms(run_started);
  return rec;
}

}  // namespace rrt_mppi

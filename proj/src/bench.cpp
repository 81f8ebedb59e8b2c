#include "rrt_mppi/bench.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "rrt_mppi/output.hpp"

namespace rrt_mppi {

BenchRow make_row(const RunRecord& run, double replan_radius, const Vec2& goal) {
  BenchRow row;
  row.mode = to_string(run.mode);
  row.seed = run.seed;
  row.replan_radius = replan_radius;
  row.outcome = run.outcome;
  row.steps = run.steps.size();
  row.replans = run.replans.size();
  row.collision_steps = run.collision_steps;
  row.final_goal_distance = distance(run.final_state.position(), goal);
  row.offline_rrt_ms = run.timing.offline_rrt_ms;
  row.mppi_ms_per_step = row.steps ? run.timing.mppi_ms / static_cast<double>(row.steps) : 0.0;
  row.replan_ms = run.timing.replan_ms;
  row.total_ms = run.timing.total_ms;
  return row;
}

namespace {

// Modes such as fixed:1,0 contain commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void accumulate(Stat& s, double x, std::size_t n) {
  if (n == 1) {
    s = {x, x, x};
    return;
  }
  s.mean += (x - s.mean) / static_cast<double>(n);
  s.min = std::min(s.min, x);
  s.max = std::max(s.max, x);
}

struct Cell {
  Mode mode;
  double radius;
  std::uint64_t seed;
};

}  // namespace

std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::vector<BenchAggregate> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchAggregate& a) {
      return a.mode == row.mode && a.replan_radius == row.replan_radius;
    });
    if (it == out.end()) {
      BenchAggregate a;
      a.mode = row.mode;
      a.replan_radius = row.replan_radius;
      out.push_back(a);
      it = std::prev(out.end());
    }
    ++it->runs;
    if (row.outcome == Outcome::kReachedGoal) ++it->reached;
    accumulate(it->steps, static_cast<double>(row.steps), it->runs);
    accumulate(it->total_ms, row.total_ms, it->runs);
  }
  return out;
}

BenchReport run_bench(const Scenario& scenario, std::size_t cell_threads) {
  std::vector<double> radii = scenario.replan_radii;
  if (radii.empty()) radii.push_back(scenario.planner.replan_radius);

  std::vector<Cell> cells;
  for (const auto& mode : scenario.modes) {
    const bool guided = mode.kind == Mode::Kind::kRrtMppi;
    for (double r : guided ? radii : std::vector<double>{scenario.planner.replan_radius})
      for (auto seed : scenario.seeds) cells.push_back({mode, r, seed});
  }

  BenchReport report;
  report.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      PlannerConfig cfg = scenario.planner;
      cfg.replan_radius = cells[i].radius;
      const RunRecord run = rrt_mppi::run(scenario.env, scenario.start, cfg, cells[i].mode, cells[i].seed);
      report.rows[i] = make_row(run, cells[i].radius, scenario.env.goal);
    }
  };
  const std::size_t lanes = std::clamp<std::size_t>(cell_threads, 1, std::max<std::size_t>(cells.size(), 1));
  if (lanes == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t l = 0; l < lanes; ++l) pool.emplace_back(worker);
  }
  return report;
}

void write_bench_rows_csv(std::ostream& out, const BenchReport& report, bool include_timing) {
  out << "mode,seed,replan_radius,outcome,steps,replans,collision_steps,final_goal_distance";
  if (include_timing) out << ",offline_rrt_ms,mppi_ms_per_step,replan_ms,total_ms";
  out << '\n';
  for (const auto& r : report.rows) {
    out << csv_field(r.mode) << ',' << r.seed << ',' << format_number(r.replan_radius) << ',' << to_string(r.outcome) << ','
        << r.steps << ',' << r.replans << ',' << r.collision_steps << ',' << format_number(r.final_goal_distance);
    if (include_timing)
      out << ',' << format_number(r.offline_rrt_ms) << ',' << format_number(r.mppi_ms_per_step) << ','
          << format_number(r.replan_ms) << ',' << format_number(r.total_ms);
    out << '\n';
  }
}

void write_bench_aggregates_csv(std::ostream& out, const std::vector<BenchAggregate>& aggregates) {
  out << "mode,replan_radius,runs,reached,steps_mean,steps_min,steps_max,total_ms_mean,total_ms_min,total_ms_max\n";
  for (const auto& a : aggregates)
    out << csv_field(a.mode) << ',' << format_number(a.replan_radius) << ',' << a.runs << ',' << a.reached << ','
        << format_number(a.steps.mean) << ',' << format_number(a.steps.min) << ',' << format_number(a.steps.max)
        << ',' << format_number(a.total_ms.mean) << ',' << format_number(a.total_ms.min) << ','
        << format_number(a.total_ms.max) << '\n';
}

}  // namespace rrt_mppi

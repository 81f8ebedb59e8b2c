#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rrt_mppi/planner.hpp"
#include "rrt_mppi/scenario.hpp"

namespace rrt_mppi {

struct BenchRow {
  std::string mode;
  std::uint64_t seed = 0;
  double replan_radius = 0.0;
  Outcome outcome = Outcome::kBudgetExhausted;
  std::size_t steps = 0;
  std::size_t replans = 0;
  std::size_t collision_steps = 0;
  double final_goal_distance = 0.0;
  // wall clock, milliseconds
  double offline_rrt_ms = 0.0;
  double mppi_ms_per_step = 0.0;
  double replan_ms = 0.0;
  double total_ms = 0.0;
};

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct BenchAggregate {
  std::string mode;
  double replan_radius = 0.0;
  std::size_t runs = 0;
  std::size_t reached = 0;
  Stat steps;
  Stat total_ms;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // ordered by mode, then R, then seed
};

BenchRow make_row(const RunRecord& run, double replan_radius, const Vec2& goal);

/// Groups rows by (mode, R) in first-appearance order.
std::vector<BenchAggregate> aggregate(const std::vector<BenchRow>& rows);

/// Runs every (mode, R, seed) cell; up to `cell_threads` cells at a time.
/// Fixed-mean modes ignore R and run once per seed.
BenchReport run_bench(const Scenario& scenario, std::size_t cell_threads = 1);

void write_bench_rows_csv(std::ostream& out, const BenchReport& report, bool include_timing = true);
void write_bench_aggregates_csv(std::ostream& out, const std::vector<BenchAggregate>& aggregates);

}  // namespace rrt_mppi

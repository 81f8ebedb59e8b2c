// rrt-mppi: command-line driver for planning runs, benchmarks, sample-size
// tables and SVG rendering.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "rrt_mppi/bench.hpp"
#include "rrt_mppi/output.hpp"
#include "rrt_mppi/planner.hpp"
#include "rrt_mppi/rrt.hpp"
#include "rrt_mppi/sample_size.hpp"
#include "rrt_mppi/scenario.hpp"

namespace fs = std::filesystem;
using namespace rrt_mppi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitPlanningFailed = 3;
constexpr int kExitInvariant = 4;

// Raised for a failed plan / unreached goal after outputs were written.
struct PlanningFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadArguments : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void error_line(const std::string& kind, int code, const std::string& message) {
  nlohmann::json e{{"error", kind}, {"exit", code}, {"message", message}};
  std::cerr << e.dump() << '\n';
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw BadArguments("not an unsigned integer: '" + s + "'");
  return v;
}

// "n..m" inclusive, or a single "n".
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_u64(text)};
  const auto lo = parse_u64(text.substr(0, dots));
  const auto hi = parse_u64(text.substr(dots + 2));
  if (hi < lo) throw BadArguments("empty seed range '" + text + "'");
  std::vector<std::uint64_t> out;
  for (auto s = lo; s <= hi; ++s) out.push_back(s);
  return out;
}

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::vector<std::string> modes;
  std::optional<double> replan_radius;
  std::string out;
  bool freeze_obstacles = false;
  std::optional<std::size_t> threads;
};

Scenario load(const Common& c) {
  if (c.scenario.empty()) throw BadArguments("--scenario is required");
  Scenario sc = load_scenario(c.scenario);
  if (c.replan_radius) {
    if (!(*c.replan_radius > 0.0)) throw BadArguments("--replan-radius must be positive");
    sc.planner.replan_radius = *c.replan_radius;
    sc.replan_radii = {*c.replan_radius};
  }
  if (c.freeze_obstacles) sc.planner.mppi.freeze_obstacles = true;
  if (c.threads) {
    if (*c.threads == 0) throw BadArguments("--threads must be at least 1");
    sc.planner.mppi.threads = *c.threads;
  }
  if (c.seed) sc.seeds = {*c.seed};
  if (!c.seeds.empty()) sc.seeds = parse_seed_range(c.seeds);
  if (!c.modes.empty()) {
    sc.modes.clear();
    for (const auto& m : c.modes) {
      try {
        sc.modes.push_back(parse_mode(m));
      } catch (const std::invalid_argument& e) {
        throw BadArguments(e.what());
      }
    }
  }
  return sc;
}

fs::path output_dir(const Common& c, const Scenario& sc) {
  fs::path dir = c.out.empty() ? fs::path(sc.output_dir) : fs::path(c.out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

template <class Fn>
void write_with(const fs::path& p, Fn&& fn) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  fn(f);
}

void add_scenario_options(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  sub->add_option("--out", c.out, "Output directory (default: scenario output_dir)");
}

int cmd_rrt(const Common& c) {
  const Scenario sc = load(c);
  const auto dir = output_dir(c, sc);
  RrtConfig cfg = sc.planner.rrt;
  cfg.seed = sc.seeds.front();
  const Environment env = sc.planner.offline_plan_over_schedule ? schedule_envelope(sc.env, 0.0) : sc.env;
  const RrtResult res = plan(env, cfg, 0.0);
  write_with(dir / "tree.csv", [&](std::ostream& o) { write_tree_csv(o, res.tree); });
  RenderLayers layers;
  layers.tree = &res.tree;
  if (res.path) layers.paths.push_back(*res.path);
  write_file(dir / "rrt.svg", render_svg(sc.env, layers));
  std::cout << "iterations=" << res.iterations << " vertices=" << res.tree.size();
  if (!res.path) {
    std::cout << " path=none\n";
    throw PlanningFailure("RRT found no path within max_iters");
  }
  write_with(dir / "path.csv", [&](std::ostream& o) { write_path_csv(o, *res.path); });
  std::cout << " waypoints=" << res.path->size() << '\n';
  return kExitOk;
}

int run_single(const Common& c, Scenario sc, const Mode& mode, const std::string& stem) {
  const auto dir = output_dir(c, sc);
  const auto seed = sc.seeds.front();
  const RunRecord rec = run(sc.env, sc.start, sc.planner, mode, seed);
  write_with(dir / (stem + "_trajectory.csv"), [&](std::ostream& o) { write_trajectory_csv(o, rec); });
  if (rec.offline_path) write_with(dir / (stem + "_path.csv"), [&](std::ostream& o) { write_path_csv(o, *rec.offline_path); });
  if (!rec.replans.empty())
    write_with(dir / (stem + "_final_path.csv"), [&](std::ostream& o) { write_path_csv(o, rec.active_path); });
  write_file(dir / (stem + ".svg"), render_svg(sc.env, layers_for(rec)));
  std::cout << "mode=" << to_string(mode) << " seed=" << seed << " outcome=" << to_string(rec.outcome)
            << " steps=" << rec.steps.size() << " replans=" << rec.replans.size()
            << " final=(" << format_number(rec.final_state.x) << "," << format_number(rec.final_state.y) << ")"
            << " total_ms=" << format_number(rec.timing.total_ms) << '\n';
  if (rec.outcome != Outcome::kReachedGoal)
    throw PlanningFailure(to_string(rec.outcome) + (rec.message.empty() ? "" : ": " + rec.message));
  return kExitOk;
}

int cmd_plan(const Common& c) { return run_single(c, load(c), Mode::rrt_mppi(), "plan"); }

int cmd_mppi(const Common& c, const std::string& mu) {
  Scenario sc = load(c);
  Mode mode;
  try {
    mode = parse_mode(mu.find(':') == std::string::npos ? "fixed:" + mu : mu);
  } catch (const std::invalid_argument& e) {
    throw BadArguments(e.what());
  }
  if (mode.kind != Mode::Kind::kFixedMean) throw BadArguments("mppi expects a fixed mean, e.g. --mu 1,0");
  return run_single(c, std::move(sc), mode, "mppi");
}

int cmd_bench(const Common& c, std::size_t cells, bool no_timing) {
  const Scenario sc = load(c);
  const auto dir = output_dir(c, sc);
  const BenchReport report = run_bench(sc, cells);
  const auto aggs = aggregate(report.rows);
  write_with(dir / "bench_rows.csv", [&](std::ostream& o) { write_bench_rows_csv(o, report, !no_timing); });
  write_with(dir / "bench_aggregates.csv", [&](std::ostream& o) { write_bench_aggregates_csv(o, aggs); });
  write_bench_aggregates_csv(std::cout, aggs);
  return kExitOk;
}

int cmd_sample_size(sample_size::Inputs in, const std::vector<double>& means) {
  std::cout << "mean,gamma,k1,k2,k\n";
  const auto k1 = sample_size::k1(in.eps1, in.rho1);
  for (double m : means) {
    in.mean_u.assign(in.var_u.size(), m);
    const double g = sample_size::gamma(in.mean_u, in.var_u);
    const auto k2 = sample_size::k2(in);
    std::cout << format_number(m) << ',' << format_number(g) << ',' << k1 << ',' << k2 << ','
              << std::max(k1, k2) << '\n';
  }
  return kExitOk;
}

int cmd_render(const Common& c, const std::string& layer) {
  Scenario sc = load(c);
  const auto dir = output_dir(c, sc);
  std::string svg;
  if (layer == "env") {
    svg = render_svg(sc.env, {});
  } else if (layer == "rrt") {
    RrtConfig cfg = sc.planner.rrt;
    cfg.seed = sc.seeds.front();
    const Environment env = sc.planner.offline_plan_over_schedule ? schedule_envelope(sc.env, 0.0) : sc.env;
    const RrtResult res = plan(env, cfg, 0.0);
    RenderLayers layers;
    layers.tree = &res.tree;
    if (res.path) layers.paths.push_back(*res.path);
    svg = render_svg(sc.env, layers);
  } else if (layer == "plan" || layer == "mppi") {
    const Mode mode = layer == "plan" ? Mode::rrt_mppi() : sc.modes.front();
    const RunRecord rec = run(sc.env, sc.start, sc.planner, mode, sc.seeds.front());
    svg = render_svg(sc.env, layers_for(rec));
  } else {
    throw BadArguments("--layers must be env, rrt, plan or mppi");
  }
  write_file(dir / "render.svg", svg);
  std::cout << (dir / "render.svg").string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RRT-guided MPPI planner: runs, benchmarks, sample-size tables, SVG rendering"};
  app.require_subcommand(1);

  Common common;
  std::string mu = "1,0";
  std::size_t bench_cells = 1;
  bool no_timing = false;
  std::string layer = "env";
  sample_size::Inputs ss;
  double ss_var = 1.0;
  std::vector<double> ss_means{0.0, 0.5, 1.0, 2.0, 4.0};

  auto* rrt_cmd = app.add_subcommand("rrt", "Offline RRT plan; writes path.csv, tree.csv, rrt.svg");
  add_scenario_options(rrt_cmd, common);
  rrt_cmd->add_option("--seed", common.seed, "RRT seed");

  auto add_run_options = [&](CLI::App* sub) {
    add_scenario_options(sub, common);
    sub->add_option("--seed", common.seed, "Run seed");
    sub->add_option("--replan-radius", common.replan_radius, "Deviation that triggers a replan");
    sub->add_flag("--freeze-obstacles", common.freeze_obstacles, "Rollouts see obstacles frozen at the step time");
    sub->add_option("--threads", common.threads, "Rollout lanes per MPPI step");
  };

  auto* plan_cmd = app.add_subcommand("plan", "Full RRT-MPPI run; writes trajectory CSV and SVG");
  add_run_options(plan_cmd);

  auto* mppi_cmd = app.add_subcommand("mppi", "Fixed-mean MPPI baseline");
  add_run_options(mppi_cmd);
  mppi_cmd->add_option("--mu,--mode", mu, "Fixed mean v,omega (or fixed:v,omega)");

  auto* bench_cmd = app.add_subcommand("bench", "Sweep modes x seeds x replan radii");
  add_scenario_options(bench_cmd, common);
  bench_cmd->add_option("--seeds", common.seeds, "Seed range n..m (inclusive)");
  bench_cmd->add_option("--seed", common.seed, "Single seed");
  bench_cmd->add_option("--mode", common.modes, "Mode(s): rrt-mppi or fixed:v,w");
  bench_cmd->add_option("--replan-radius", common.replan_radius, "Single replan radius");
  bench_cmd->add_flag("--freeze-obstacles", common.freeze_obstacles, "Rollouts see obstacles frozen");
  bench_cmd->add_option("--threads", common.threads, "Rollout lanes per MPPI step");
  bench_cmd->add_option("--cells", bench_cells, "Runs executed concurrently")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--no-timing", no_timing, "Omit wall-clock columns from bench_rows.csv");

  auto* ss_cmd = app.add_subcommand("sample-size", "Required sample size table over a mean grid");
  ss_cmd->add_option("--eps1", ss.eps1, "Error bound of the E1 estimate");
  ss_cmd->add_option("--eps2", ss.eps2, "Error bound of the E2 estimate");
  ss_cmd->add_option("--rho1", ss.rho1, "Risk probability for K1");
  ss_cmd->add_option("--rho2", ss.rho2, "Risk probability for K2");
  ss_cmd->add_option("--var", ss_var, "Control variance (per channel)");
  ss_cmd->add_option("--e1-hat", ss.e1_hat, "Estimate of E[exp(-S/lambda)]");
  ss_cmd->add_option("--means", ss_means, "Mean grid")->delimiter(',');

  auto* render_cmd = app.add_subcommand("render", "SVG of environment and optional planning layers");
  add_scenario_options(render_cmd, common);
  render_cmd->add_option("--seed", common.seed, "Seed for planning layers");
  render_cmd->add_option("--layers", layer, "env | rrt | plan | mppi");
  render_cmd->add_option("--mode", common.modes, "Mode used by --layers mppi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("arguments", kExitBadInput, e.what());
    return kExitBadInput;
  }

  try {
    if (*rrt_cmd) return cmd_rrt(common);
    if (*plan_cmd) return cmd_plan(common);
    if (*mppi_cmd) return cmd_mppi(common, mu);
    if (*bench_cmd) return cmd_bench(common, bench_cells, no_timing);
    if (*ss_cmd) {
      ss.var_u = {ss_var};
      ss.mean_u = {0.0};
      return cmd_sample_size(ss, ss_means);
    }
    if (*render_cmd) return cmd_render(common, layer);
  } catch (const ScenarioError& e) {
    error_line("scenario", kExitBadInput, e.what());
    return kExitBadInput;
  } catch (const BadArguments& e) {
    error_line("arguments", kExitBadInput, e.what());
    return kExitBadInput;
  } catch (const sample_size::AssumptionViolation& e) {
    error_line("arguments", kExitBadInput, e.what());
    return kExitBadInput;
  } catch (const PlanningFailure& e) {
    error_line("planning", kExitPlanningFailed, e.what());
    return kExitPlanningFailed;
  } catch (const std::invalid_argument& e) {
    error_line("arguments", kExitBadInput, e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    error_line("invariant", kExitInvariant, e.what());
    return kExitInvariant;
  }
  return kExitInvariant;
}

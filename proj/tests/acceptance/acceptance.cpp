// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rrt_mppi/mppi.hpp"
#include "rrt_mppi/output.hpp"
#include "rrt_mppi/planner.hpp"
#include "rrt_mppi/sample_size.hpp"
#include "rrt_mppi/scenario.hpp"

using namespace rrt_mppi;
namespace ss = rrt_mppi::sample_size;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("CRITERION %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Scenario load(const std::string& name) {
  return load_scenario(std::string(RRT_MPPI_SOURCE_DIR) + "/scenarios/" + name + ".json");
}

bool reached(const RunRecord& r, const Vec2& goal, double tol) {
  return r.outcome == Outcome::kReachedGoal && r.collision_steps == 0 &&
         distance(r.final_state.position(), goal) <= tol;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// ---------------------------------------------------------------------------

void sample_size_exact() {
  const auto k = ss::k1(0.02, 0.05);
  report(1, "k1(0.02, 0.05)", k == 9222 || k == 9223, fmt("k1 = %llu (expected 9222 or 9223)", (unsigned long long)k));
}

void monotone_in_mean() {
  ss::Inputs in;
  in.eps1 = 0.02;
  in.eps2 = 0.1;
  in.rho1 = 0.05;
  in.rho2 = 0.1;
  in.var_u = {1.0};
  in.e1_hat = 0.5;
  bool increasing = true, k1_const = true;
  std::uint64_t prev_k2 = 0, first_k1 = 0;
  std::string values;
  bool first = true;
  for (double m : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    in.mean_u = {m};
    const auto a = ss::k1(in.eps1, in.rho1);
    const auto b = ss::k2(in);
    if (first) first_k1 = a;
    if (!first && b <= prev_k2) increasing = false;
    if (a != first_k1) k1_const = false;
    prev_k2 = b;
    first = false;
    values += fmt("%s%g:%llu", values.empty() ? "" : " ", m, (unsigned long long)b);
  }
  report(2, "k2 strictly increasing over mean grid", increasing && k1_const,
         "k2 = {" + values + "}, k1 = " + std::to_string(first_k1) + (k1_const ? " constant" : " varies"));
}

void product_variance_oracle() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> support(1, 8);
  std::uniform_real_distribution<double> value(-5.0, 5.0), weight(0.0, 1.0);
  auto draw = [&] {
    ss::Discrete d;
    const int n = support(rng);
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      // Occasional repeated values and zero-probability atoms.
      const double v = (k > 0 && weight(rng) < 0.1) ? d.back().first : value(rng);
      const double p = weight(rng) < 0.05 ? 0.0 : weight(rng) + 1e-3;
      d.push_back({v, p});
      total += p;
    }
    if (total == 0.0) {
      d.front().second = 1.0;
      total = 1.0;
    }
    for (auto& e : d) e.second /= total;
    return d;
  };
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = draw();
    const auto y = draw();
    if (!ss::verify_product_variance_bound(x, y)) {
      ++violations;
      worst = std::min(worst, ss::product_variance_terms(x, y).slack());
    }
  }
  const auto ce = ss::product_variance_terms({{0.0, 0.5}, {1.0, 0.5}}, {{1.0, 1.0}});
  report(3, "variance-of-product bound on 1000 random pairs", violations == 0,
         fmt("%d/1000 pairs violate the bound (worst slack %.4g); X~U{0,1}, Y=1: Var[XY]=%.2f > bound=%.2f",
             violations, worst, ce.var_xy, ce.bound));
}

void weight_moment_check() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.1, 10.0), scale(0.01, 20.0);
  std::uniform_int_distribution<int> size(1, 500);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = lam(rng);
    std::exponential_distribution<double> cost(1.0 / scale(rng));
    std::vector<double> w(size(rng));
    for (auto& x : w) x = std::exp(-cost(rng) / lambda);
    if (!ss::weight_moment_chain(w).holds(1e-12)) ++bad;
  }
  report(4, "weight moment chain Var <= (1-m)m <= m <= 1", bad == 0, fmt("%d/100 samples violate", bad));
}

void shift_invariance() {
  std::mt19937_64 rng(11);
  // Dyadic costs and shifts keep S + c exact, so only the implementation is measured.
  std::uniform_int_distribution<std::int64_t> cost(0, 100 << 16), shift(-(std::int64_t{10000} << 16),
                                                                         std::int64_t{10000} << 16);
  std::uniform_real_distribution<double> lam(0.2, 5.0);
  const double unit = std::ldexp(1.0, -16);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + trial * 5, horizon = 1 + trial % 10;
    const double lambda = lam(rng), c = static_cast<double>(shift(rng)) * unit;
    std::vector<Rollout> a(k);
    std::vector<double> sa(k), sb(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i].controls.resize(horizon);
      for (auto& u : a[i].controls) u = {n(rng), n(rng)};
      sa[i] = static_cast<double>(cost(rng)) * unit;
      sb[i] = sa[i] + c;
    }
    auto b = a;
    const auto wa = weights(sa, lambda), wb = weights(sb, lambda);
    for (std::size_t i = 0; i < k; ++i) {
      worst = std::max(worst, rel(wa[i], wb[i]));
      a[i].cost = sa[i];
      a[i].weight = wa[i];
      b[i].cost = sb[i];
      b[i].weight = wb[i];
    }
    const auto ua = update_controls(a), ub = update_controls(b);
    for (std::size_t j = 0; j < horizon; ++j)
      worst = std::max({worst, rel(ua[j].v, ub[j].v), rel(ua[j].omega, ub[j].omega)});
  }
  report(5, "softmax shift invariance", worst <= 1e-12, fmt("max relative difference %.3g (tol 1e-12)", worst));
}

void zero_variance() {
  const auto sc = load("workspace_static");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> px(1.0, 49.0), py(1.0, 26.0), ang(-3.0, 3.0), ph(-1.0, 1.0),
      u(-2.0, 2.0);
  std::uniform_int_distribution<int> horizon(1, 30), samples(1, 200);
  int mismatches = 0, done = 0;
  while (done < 20) {
    const State s{px(rng), py(rng), ang(rng), ph(rng)};
    if (is_in_obstacle(s.position(), 0.0, sc.env)) continue;
    MppiConfig cfg = sc.planner.mppi;
    cfg.sigma = {0.0, 0.0};
    cfg.samples = static_cast<std::size_t>(samples(rng));
    cfg.horizon = static_cast<std::size_t>(horizon(rng));
    cfg.seed = rng();
    MeanSequence mean(cfg.horizon);
    for (auto& c : mean) c = {u(rng), u(rng)};
    try {
      const auto res = mppi_step(s, mean, 0.0, static_cast<std::uint64_t>(done), sc.env, cfg, sc.planner.dynamics);
      if (!(res.executed == mean.front())) ++mismatches;
    } catch (const DegenerateSamples&) {
      continue;
    }
    ++done;
  }
  report(6, "zero-variance degeneracy", mismatches == 0, fmt("%d/20 configurations differ from the mean", mismatches));
}

void determinism() {
  const auto sc = load("workspace_static");
  auto cfg = sc.planner;
  cfg.max_steps = 50;
  std::string csv[2];
  int k = 0;
  for (std::size_t lanes : {1u, 8u}) {
    cfg.mppi.threads = lanes;
    const auto rec = run(sc.env, sc.start, cfg, Mode::rrt_mppi(), 3);
    std::ostringstream out;
    write_trajectory_csv(out, rec);
    csv[k++] = out.str();
  }
  const bool same = csv[0] == csv[1];
  const auto rows = std::count(csv[0].begin(), csv[0].end(), '\n');
  report(7, "determinism across execution lanes", same,
         fmt("1 vs 8 lanes, 50 steps: %s (%ld CSV lines)", same ? "bit-identical" : "DIFFERENT", (long)rows));
}

// Success count observed on the first run; later runs must not drop below it.
constexpr int kPinnedRrtSuccesses = 50;

void rrt_validity() {
  const auto sc = load("workspace_static");
  RrtConfig cfg = sc.planner.rrt;
  int found = 0, invalid = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    cfg.seed = seed;
    const auto res = plan(sc.env, cfg, 0.0);
    if (!res.path) continue;
    ++found;
    const auto& w = res.path->waypoints;
    bool ok = w.size() >= 2 && w.front() == sc.env.start && w.back() == sc.env.goal;
    for (std::size_t i = 1; ok && i < w.size(); ++i)
      ok = distance(w[i - 1], w[i]) <= cfg.gamma + 1e-12 && segment_free(w[i - 1], w[i], 0.0, sc.env, cfg.resolution);
    if (!ok) ++invalid;
  }
  report(8, "RRT path validity", invalid == 0 && found >= kPinnedRrtSuccesses,
         fmt("%d/50 plans found (pinned >= %d), %d invalid", found, kPinnedRrtSuccesses, invalid));
}

void static_success() {
  const auto sc = load("workspace_static");
  auto cfg = sc.planner;
  cfg.mppi.samples = 10000;
  cfg.mppi.horizon = 20;
  cfg.replan_radius = 6.0;
  int ok = 0;
  std::string outcomes;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rec = run(sc.env, sc.start, cfg, Mode::rrt_mppi(), seed);
    if (reached(rec, sc.env.goal, 1.0)) ++ok;
    outcomes += fmt("%s%s/%zu", outcomes.empty() ? "" : " ", to_string(rec.outcome).c_str(), rec.steps.size());
  }
  report(9, "static success, rrt-mppi K=10000 T=20 R=6", ok >= 9, fmt("%d/10 reached (need >= 9) [", ok) + outcomes + "]");
}

void dynamic_separation() {
  const auto sc = load("workspace_grow4");
  auto cfg = sc.planner;
  cfg.max_steps = 600;
  int guided = 0, fixed = 0;
  std::string g_out, f_out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = run(sc.env, sc.start, cfg, Mode::rrt_mppi(), seed);
    const auto b = run(sc.env, sc.start, cfg, Mode::fixed({1.0, 0.0}), seed);
    guided += reached(a, sc.env.goal, cfg.goal_tolerance);
    fixed += reached(b, sc.env.goal, cfg.goal_tolerance);
    g_out += fmt("%s%s", g_out.empty() ? "" : " ", to_string(a.outcome).c_str());
    f_out += fmt("%s%s", f_out.empty() ? "" : " ", to_string(b.outcome).c_str());
  }
  report(10, "dynamic +4 separation, 600-step budget", fixed <= 3 && guided >= 7,
         fmt("rrt-mppi %d/10 (need >= 7), fixed:1,0 %d/10 (need <= 3); rrt-mppi [", guided, fixed) + g_out +
             "] fixed [" + f_out + "]");
}

void replan_trigger_timing() {
  // The offline plan detours around a wall that never activates during the
  // run; with the heading frozen the robot drives straight and the deviation
  // from the detour grows until the trigger fires.
  Environment env;
  env.bounds = {{0, 0}, {60, 30}};
  env.start = {2, 15};
  env.goal = {57, 15};
  env.obstacles.push_back({Circle{{59.5, 0.5}, 0.2}, {{1e6, Rect{{10, 1}, {50, 29}}}}});
  PlannerConfig cfg;
  cfg.mppi.samples = 1000;
  cfg.mppi.sigma = {1.0, 0.0};
  cfg.dynamics.noise_scale = {1.0, 0.0};
  cfg.gains.k_p = 1e-3;
  cfg.max_steps = 600;

  bool all = true;
  std::string detail;
  for (double radius : {2.0, 4.0, 6.0, 8.0}) {
    cfg.replan_radius = radius;
    const auto rec = run(env, {2, 15, 0, 0}, cfg, Mode::rrt_mppi(), 1);
    std::size_t first = rec.steps.size();
    bool exact = true;
    std::size_t e = 0;
    for (const auto& s : rec.steps) {
      const bool due = s.deviation >= radius;
      if (due && first == rec.steps.size()) first = s.step;
      if (s.replanned != due) exact = false;
      if (s.replanned) exact = exact && e < rec.replans.size() && rec.replans[e++].step == s.step;
    }
    exact = exact && e == rec.replans.size();
    const bool ok = exact && !rec.replans.empty() && rec.replans.front().step == first;
    all = all && ok;
    detail += fmt("%sR=%g first>=R step %zu, first event %ld, %zu events%s", detail.empty() ? "" : "; ", radius, first,
                  rec.replans.empty() ? -1L : (long)rec.replans.front().step, rec.replans.size(), ok ? "" : " MISMATCH");
  }
  report(11, "replan trigger fires at first step with deviation >= R", all, detail);
}

struct ModeEstimate {
  int runs = 0;
  double e1_raw = 0.0;      // mean over runs of mean(exp(-S / lambda))
  double e1_shifted = 0.0;  // mean over runs of mean(exp(-(S - min S) / lambda))
  double min_cost = 0.0;
  std::vector<double> mean_u{0.0, 0.0};
  std::vector<double> var_u{0.0, 0.0};
};

void sample_size_ordering() {
  const auto sc = load("workspace_static");
  auto cfg = sc.planner;
  const std::size_t mark = static_cast<std::size_t>(std::lround(2.5 / cfg.dynamics.dt));
  cfg.max_steps = mark + 1;
  const double sig_v = cfg.mppi.sigma.v * cfg.mppi.sigma.v, sig_w = cfg.mppi.sigma.omega * cfg.mppi.sigma.omega;

  auto estimate = [&](const Mode& mode) {
    ModeEstimate m;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto rec = run(sc.env, sc.start, cfg, mode, seed, {{mark}, false});
      if (rec.steps.size() <= mark) continue;
      const auto& st = rec.steps[mark];
      ++m.runs;
      m.e1_raw += ss::estimate_e1(st.diagnostics.costs, cfg.mppi.lambda);
      m.e1_shifted += st.diagnostics.mean_weight;
      m.min_cost += st.diagnostics.min_cost;
      m.mean_u[0] += st.mean_average.v;
      m.mean_u[1] += st.mean_average.omega;
      m.var_u[0] += sig_v + st.mean_variance.v;
      m.var_u[1] += sig_w + st.mean_variance.omega;
    }
    if (m.runs > 0) {
      const double n = m.runs;
      m.e1_raw /= n;
      m.e1_shifted /= n;
      m.min_cost /= n;
      for (auto* v : {&m.mean_u, &m.var_u})
        for (auto& x : *v) x /= n;
    }
    return m;
  };

  const auto g = estimate(Mode::rrt_mppi());
  const auto f = estimate(Mode::fixed({1.0, 0.0}));
  auto k2_or_reason = [&](const ModeEstimate& m, double eps1, double e1, std::string& out) -> long long {
    ss::Inputs in;
    in.eps1 = eps1;
    in.mean_u = m.mean_u;
    in.var_u = m.var_u;
    in.e1_hat = e1;
    try {
      const auto k = ss::k2(in);
      out = std::to_string(k);
      return static_cast<long long>(k);
    } catch (const std::exception& e) {
      out = "unavailable (" + std::string(e.what()) + ")";
      return -1;
    }
  };

  std::string kg, kf;
  const long long a = g.runs ? k2_or_reason(g, 0.02, g.e1_raw, kg) : -1;
  const long long b = f.runs ? k2_or_reason(f, 0.02, f.e1_raw, kf) : -1;
  const bool pass = a > 0 && b > 0 && a < b;

  std::string detail = fmt(
      "step %zu, %d+%d runs; rrt-mppi: E1_hat=%.3g (min-shifted %.3g, min cost %.4g), Gamma=%.4g, k2=%s; "
      "fixed:1,0: E1_hat=%.3g (min-shifted %.3g, min cost %.4g), Gamma=%.4g, k2=%s",
      mark, g.runs, f.runs, g.e1_raw, g.e1_shifted, g.min_cost, ss::gamma(g.mean_u, g.var_u), kg.c_str(), f.e1_raw,
      f.e1_shifted, f.min_cost, ss::gamma(f.mean_u, f.var_u), kf.c_str());
  // Informational: the same comparison on the min-shifted estimates with a common eps1 below both.
  if (g.runs && f.runs) {
    const double eps = 0.5 * std::min(g.e1_shifted, f.e1_shifted);
    std::string sg, sf;
    k2_or_reason(g, eps, g.e1_shifted, sg);
    k2_or_reason(f, eps, f.e1_shifted, sf);
    detail += fmt("; min-shifted with eps1=%.3g: k2 %s vs %s", eps, sg.c_str(), sf.c_str());
  }
  report(12, "k2(rrt-mppi) < k2(fixed:1,0) at 2.5 s", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<void (*)()> criteria{sample_size_exact, monotone_in_mean, product_variance_oracle, weight_moment_check,
                                         shift_invariance,  zero_variance,    determinism,     rrt_validity,
                                         static_success,    dynamic_separation, replan_trigger_timing,
                                         sample_size_ordering};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto started = std::chrono::steady_clock::now();
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(id, "criterion raised", false, e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("             (%.1f s)\n", s);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

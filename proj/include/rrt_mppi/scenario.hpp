#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrt_mppi/dynamics.hpp"
#include "rrt_mppi/env.hpp"
#include "rrt_mppi/planner.hpp"

namespace rrt_mppi {

inline constexpr int kScenarioVersion = 1;
inline constexpr const char* kEnvOverridePrefix = "RRT_MPPI_";

/// Everything one experiment needs: workspace, endpoints, configuration and
/// the sweep dimensions used by `bench`.
struct Scenario {
  int version = kScenarioVersion;
  std::string description;
  Environment env;  // env.start / env.goal mirror the positions of start / goal
  State start;
  State goal;
  PlannerConfig planner;
  std::vector<Mode> modes{Mode::rrt_mppi()};
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> replan_radii;  // empty: planner.replan_radius only
  std::string output_dir = "out";

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Malformed or invalid scenario; the message starts with the field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict parse (unknown fields rejected), defaults for omitted optional
/// fields, then full validation. `overrides` maps env-var style keys
/// (RRT_MPPI_MPPI__SAMPLES) to JSON-encoded values, applied before parsing.
Scenario parse_scenario(const nlohmann::json& doc, const std::map<std::string, std::string>& overrides = {});

/// Reads the file and applies RRT_MPPI_* environment overrides.
Scenario load_scenario(const std::string& path);

/// Every RRT_MPPI_* variable in the process environment.
std::map<std::string, std::string> environment_overrides();

nlohmann::json to_json(const Scenario& scenario);

}  // namespace rrt_mppi

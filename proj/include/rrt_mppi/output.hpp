#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rrt_mppi/env.hpp"
#include "rrt_mppi/planner.hpp"
#include "rrt_mppi/rrt.hpp"

namespace rrt_mppi {

/// Shortest round-trip decimal form.
std::string format_number(double x);

/// One row per executed step (pre-step state and the control applied), then
/// a final row holding the terminal state with the control fields empty.
void write_trajectory_csv(std::ostream& out, const RunRecord& run);

void write_path_csv(std::ostream& out, const Path& path);

/// Columns: index, x, y, parent (empty for the root).
void write_tree_csv(std::ostream& out, const Tree& tree);

struct RenderLayers {
  const Tree* tree = nullptr;
  std::vector<Path> paths;   // drawn dash-dot
  std::vector<Vec2> trajectory;
};

/// Standalone SVG 1.1 document. Obstacles are drawn with their t = 0 shape
/// solid and every later scheduled shape dotted.
std::string render_svg(const Environment& env, const RenderLayers& layers);

RenderLayers layers_for(const RunRecord& run);

}  // namespace rrt_mppi

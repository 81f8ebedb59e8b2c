#include "rrt_mppi/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rrt_mppi {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const RunRecord& run) {
  out << "step,t,x,y,theta,phi,v,omega,deviation,replanned,min_rollout_cost,ess\n";
  auto state_fields = [&](const State& s) {
    out << format_number(s.x) << ',' << format_number(s.y) << ',' << format_number(s.theta) << ','
        << format_number(s.phi);
  };
  for (const auto& r : run.steps) {
    out << r.step << ',' << format_number(r.t) << ',';
    state_fields(r.state);
    out << ',' << format_number(r.executed.v) << ',' << format_number(r.executed.omega) << ',';
    if (!std::isnan(r.deviation)) out << format_number(r.deviation);
    out << ',' << (r.replanned ? 1 : 0) << ',' << format_number(r.diagnostics.min_cost) << ','
        << format_number(r.diagnostics.ess) << '\n';
  }
  out << run.steps.size() << ',' << format_number(run.final_time) << ',';
  state_fields(run.final_state);
  out << ",,,,,,\n";
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "index,x,y\n";
  for (std::size_t i = 0; i < path.size(); ++i)
    out << i << ',' << format_number(path.waypoints[i].x) << ',' << format_number(path.waypoints[i].y) << '\n';
}

void write_tree_csv(std::ostream& out, const Tree& tree) {
  out << "index,x,y,parent\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out << i << ',' << format_number(tree.vertices[i].x) << ',' << format_number(tree.vertices[i].y) << ',';
    if (tree.parent[i] != Tree::kNoParent) out << tree.parent[i];
    out << '\n';
  }
}

namespace {

class SvgWriter {
 public:
  explicit SvgWriter(const Box& bounds) : b_(bounds) {}

  // SVG y grows downward; the workspace y grows upward.
  std::string x(double v) const { return format_number(v - b_.min.x); }
  std::string y(double v) const { return format_number(b_.max.y - v); }

  void shape(std::ostringstream& out, const Shape& s, const std::string& style) const {
    if (const auto* c = std::get_if<Circle>(&s)) {
      out << "  <circle cx=\"" << x(c->center.x) << "\" cy=\"" << y(c->center.y) << "\" r=\""
          << format_number(c->radius) << "\" " << style << "/>\n";
    } else {
      const auto& r = std::get<Rect>(s);
      out << "  <rect x=\"" << x(r.min.x) << "\" y=\"" << y(r.max.y) << "\" width=\"" << format_number(r.width())
          << "\" height=\"" << format_number(r.height()) << "\" " << style << "/>\n";
    }
  }

  void polyline(std::ostringstream& out, const std::vector<Vec2>& pts, const std::string& style) const {
    if (pts.empty()) return;
    out << "  <polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << x(pts[i].x) << ',' << y(pts[i].y);
    out << "\" fill=\"none\" " << style << "/>\n";
  }

 private:
  Box b_;
};

}  // namespace

std::string render_svg(const Environment& env, const RenderLayers& layers) {
  const SvgWriter w(env.bounds);
  const double width = env.bounds.width();
  const double height = env.bounds.height();
  const double stroke = std::max(width, height) / 500.0;
  const std::string sw = "stroke-width=\"" + format_number(stroke) + "\"";

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << format_number(width) << ' '
      << format_number(height) << "\" width=\"" << format_number(width * 20) << "\" height=\""
      << format_number(height * 20) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << format_number(width) << "\" height=\"" << format_number(height)
      << "\" fill=\"white\" stroke=\"black\" " << sw << "/>\n";

  for (const auto& obs : env.obstacles) {
    w.shape(out, obs.shape, "fill=\"none\" stroke=\"black\" " + sw);
    for (const auto& entry : obs.schedule)
      w.shape(out, entry.shape,
              "fill=\"none\" stroke=\"black\" stroke-dasharray=\"" + format_number(stroke) + " " +
                  format_number(3 * stroke) + "\" " + sw);
  }

  if (layers.tree) {
    const Tree& tree = *layers.tree;
    out << "  <g stroke=\"#9bbf9b\" " << sw << ">\n";
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (tree.parent[i] == Tree::kNoParent) continue;
      const Vec2& a = tree.vertices[tree.parent[i]];
      const Vec2& b = tree.vertices[i];
      out << "    <line x1=\"" << w.x(a.x) << "\" y1=\"" << w.y(a.y) << "\" x2=\"" << w.x(b.x) << "\" y2=\"" << w.y(b.y)
          << "\"/>\n";
    }
    out << "  </g>\n";
  }

  const std::string dash_dot =
      format_number(6 * stroke) + " " + format_number(3 * stroke) + " " + format_number(stroke) + " " +
      format_number(3 * stroke);
  for (const auto& p : layers.paths)
    w.polyline(out, p.waypoints, "stroke=\"blue\" stroke-dasharray=\"" + dash_dot + "\" " + sw);
  w.polyline(out, layers.trajectory, "stroke=\"orange\" stroke-width=\"" + format_number(2 * stroke) + "\"");

  const double m = 0.4;
  out << "  <rect x=\"" << w.x(env.start.x - m) << "\" y=\"" << w.y(env.start.y + m) << "\" width=\""
      << format_number(2 * m) << "\" height=\"" << format_number(2 * m) << "\" fill=\"green\"/>\n";
  out << "  <path d=\"M " << w.x(env.goal.x - m) << ' ' << w.y(env.goal.y - m) << " L " << w.x(env.goal.x + m) << ' '
      << w.y(env.goal.y + m) << " M " << w.x(env.goal.x - m) << ' ' << w.y(env.goal.y + m) << " L "
      << w.x(env.goal.x + m) << ' ' << w.y(env.goal.y - m) << "\" stroke=\"red\" stroke-width=\""
      << format_number(2 * stroke) << "\"/>\n";
  out << "</svg>\n";
  return out.str();
}

RenderLayers layers_for(const RunRecord& run) {
  RenderLayers layers;
  if (!run.offline_tree.vertices.empty()) layers.tree = &run.offline_tree;
  if (run.offline_path) layers.paths.push_back(*run.offline_path);
  if (!run.replans.empty() && !run.active_path.empty()) layers.paths.push_back(run.active_path);
  for (const auto& s : run.steps) layers.trajectory.push_back(s.state.position());
  if (!run.steps.empty()) layers.trajectory.push_back(run.final_state.position());
  return layers;
}

}  // namespace rrt_mppi

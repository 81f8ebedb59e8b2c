#include "rrt_mppi/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

extern char** environ;

namespace rrt_mppi {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ScenarioError((path.empty() ? std::string("<root>") : path) + ": " + what);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (!v) fail(field(key), "required field missing");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    return v ? as_number(*v, field(key)) : fallback;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = get(key);
    return v ? as_count(*v, field(key)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) fail(field(key), "unknown field");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  static std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  static std::vector<double> numbers(const json& v, const std::string& path, std::size_t n) {
    if (!v.is_array() || v.size() != n) fail(path, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec2 parse_vec2(const json& v, const std::string& path) {
  const auto n = ObjectReader::numbers(v, path, 2);
  return {n[0], n[1]};
}

State parse_state(const json& v, const std::string& path) {
  if (v.is_array() && v.size() == 2) {
    const auto p = parse_vec2(v, path);
    return {p.x, p.y, 0.0, 0.0};
  }
  const auto n = ObjectReader::numbers(v, path, 4);
  return {n[0], n[1], n[2], n[3]};
}

Control parse_control(const json& v, const std::string& path) {
  const auto n = ObjectReader::numbers(v, path, 2);
  return {n[0], n[1]};
}

Box parse_box(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  Box b{parse_vec2(r.require("min"), r.field("min")), parse_vec2(r.require("max"), r.field("max"))};
  r.finish();
  return b;
}

// Reads exactly one of "circle" / "rect" from an object that may carry other keys.
Shape parse_shape(ObjectReader& r) {
  const json* circle = r.get("circle");
  const json* rect = r.get("rect");
  if (circle && rect) ObjectReader::fail(r.field("circle"), "give either circle or rect, not both");
  if (circle) {
    ObjectReader c(*circle, r.field("circle"));
    Circle out{parse_vec2(c.require("center"), c.field("center")),
               ObjectReader::as_number(c.require("radius"), c.field("radius"))};
    c.finish();
    return out;
  }
  if (rect) return parse_box(*rect, r.field("rect"));
  ObjectReader::fail(r.field("circle"), "obstacle shape missing (circle or rect)");
}

Obstacle parse_obstacle(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  Obstacle obs;
  obs.shape = parse_shape(r);
  if (const json* sched = r.get("schedule")) {
    if (!sched->is_array()) ObjectReader::fail(r.field("schedule"), "expected an array");
    for (std::size_t k = 0; k < sched->size(); ++k) {
      ObjectReader e((*sched)[k], r.field("schedule") + "[" + std::to_string(k) + "]");
      ScheduleEntry entry;
      entry.activation_time = ObjectReader::as_number(e.require("time"), e.field("time"));
      entry.shape = parse_shape(e);
      e.finish();
      obs.schedule.push_back(std::move(entry));
    }
  }
  r.finish();
  return obs;
}

json vec2_json(const Vec2& p) { return json::array({p.x, p.y}); }

json shape_json(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s))
    return {{"circle", {{"center", vec2_json(c->center)}, {"radius", c->radius}}}};
  const auto& r = std::get<Rect>(s);
  return {{"rect", {{"min", vec2_json(r.min)}, {"max", vec2_json(r.max)}}}};
}

std::vector<std::string> split_path(const std::string& key) {
  std::vector<std::string> parts;
  std::string rest = key;
  for (;;) {
    const auto pos = rest.find("__");
    std::string part = rest.substr(0, pos);
    std::transform(part.begin(), part.end(), part.begin(), [](unsigned char c) { return std::tolower(c); });
    parts.push_back(part);
    if (pos == std::string::npos) break;
    rest = rest.substr(pos + 2);
  }
  return parts;
}

void apply_overrides(json& doc, const std::map<std::string, std::string>& overrides) {
  const std::string prefix = kEnvOverridePrefix;
  for (const auto& [name, raw] : overrides) {
    if (name.rfind(prefix, 0) != 0) continue;
    const auto parts = split_path(name.substr(prefix.size()));
    json* node = &doc;
    std::string path;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      path += (i ? "." : "") + parts[i];
      if (parts[i].empty()) ObjectReader::fail(name, "malformed override name");
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) ObjectReader::fail(path, "override target is not an object");
      node = &(*node)[parts[i]];
    }
    json value = json::parse(raw, nullptr, false);
    *node = value.is_discarded() ? json(raw) : value;
  }
}

}  // namespace

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  const std::string prefix = kEnvOverridePrefix;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(0, eq);
    if (name.rfind(prefix, 0) == 0) out[name] = entry.substr(eq + 1);
  }
  return out;
}

Scenario parse_scenario(const json& input, const std::map<std::string, std::string>& overrides) {
  json doc = input;
  apply_overrides(doc, overrides);

  Scenario sc;
  ObjectReader root(doc, "");
  sc.version = static_cast<int>(root.count("version", kScenarioVersion));
  if (sc.version != kScenarioVersion)
    ObjectReader::fail("version", "unsupported scenario version " + std::to_string(sc.version));
  sc.description = root.string("description", "");

  sc.env.bounds = parse_box(root.require("bounds"), "bounds");
  sc.start = parse_state(root.require("start"), "start");
  sc.goal = parse_state(root.require("goal"), "goal");
  sc.env.start = sc.start.position();
  sc.env.goal = sc.goal.position();
  if (const json* obstacles = root.get("obstacles")) {
    if (!obstacles->is_array()) ObjectReader::fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < obstacles->size(); ++i)
      sc.env.obstacles.push_back(parse_obstacle((*obstacles)[i], "obstacles[" + std::to_string(i) + "]"));
  }

  PlannerConfig& pc = sc.planner;
  if (const json* v = root.get("dynamics")) {
    ObjectReader r(*v, "dynamics");
    pc.dynamics.wheelbase = r.number("wheelbase", pc.dynamics.wheelbase);
    pc.dynamics.dt = r.number("dt", pc.dynamics.dt);
    if (const json* n = r.get("noise_scale")) pc.dynamics.noise_scale = parse_control(*n, r.field("noise_scale"));
    r.finish();
  }
  if (const json* v = root.get("rrt")) {
    ObjectReader r(*v, "rrt");
    pc.rrt.gamma = r.number("gamma", pc.rrt.gamma);
    pc.rrt.max_iters = r.count("max_iters", pc.rrt.max_iters);
    pc.rrt.goal_bias = r.number("goal_bias", pc.rrt.goal_bias);
    pc.rrt.resolution = r.number("resolution", pc.rrt.resolution);
    r.finish();
  }
  if (const json* v = root.get("mppi")) {
    ObjectReader r(*v, "mppi");
    pc.mppi.samples = r.count("samples", pc.mppi.samples);
    pc.mppi.horizon = r.count("horizon", pc.mppi.horizon);
    pc.mppi.lambda = r.number("lambda", pc.mppi.lambda);
    if (const json* s = r.get("sigma")) pc.mppi.sigma = parse_control(*s, r.field("sigma"));
    if (const json* m = r.get("control_penalty")) {
      const std::string path = r.field("control_penalty");
      if (!m->is_array() || m->size() != 2) ObjectReader::fail(path, "expected a 2x2 array");
      const auto row0 = ObjectReader::numbers((*m)[0], path + "[0]", 2);
      const auto row1 = ObjectReader::numbers((*m)[1], path + "[1]", 2);
      pc.mppi.control_penalty = {row0[0], row0[1], row1[0], row1[1]};
    }
    pc.mppi.obstacle_penalty = r.number("obstacle_penalty", pc.mppi.obstacle_penalty);
    pc.mppi.terminal_weight = r.number("terminal_weight", pc.mppi.terminal_weight);
    pc.mppi.freeze_obstacles = r.boolean("freeze_obstacles", pc.mppi.freeze_obstacles);
    pc.mppi.threads = r.count("threads", pc.mppi.threads);
    r.finish();
  }
  if (const json* v = root.get("gains")) {
    ObjectReader r(*v, "gains");
    pc.gains.v_max = r.number("v_max", pc.gains.v_max);
    pc.gains.alpha = r.number("alpha", pc.gains.alpha);
    pc.gains.k_p = r.number("k_p", pc.gains.k_p);
    pc.gains.lookahead = r.count("lookahead", pc.gains.lookahead);
    r.finish();
  }
  if (const json* v = root.get("planner")) {
    ObjectReader r(*v, "planner");
    pc.replan_radius = r.number("replan_radius", pc.replan_radius);
    pc.goal_tolerance = r.number("goal_tolerance", pc.goal_tolerance);
    pc.max_steps = r.count("max_steps", pc.max_steps);
    pc.offline_plan_over_schedule = r.boolean("offline_plan_over_schedule", pc.offline_plan_over_schedule);
    r.finish();
  }
  if (const json* v = root.get("modes")) {
    if (!v->is_array() || v->empty()) ObjectReader::fail("modes", "expected a nonempty array of mode strings");
    sc.modes.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "modes[" + std::to_string(i) + "]";
      if (!(*v)[i].is_string()) ObjectReader::fail(path, "expected a string");
      try {
        sc.modes.push_back(parse_mode((*v)[i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        ObjectReader::fail(path, e.what());
      }
    }
  }
  if (const json* v = root.get("seeds")) {
    if (!v->is_array() || v->empty()) ObjectReader::fail("seeds", "expected a nonempty array of integers");
    sc.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      sc.seeds.push_back(ObjectReader::as_count((*v)[i], "seeds[" + std::to_string(i) + "]"));
  }
  if (const json* v = root.get("replan_radii")) {
    if (!v->is_array()) ObjectReader::fail("replan_radii", "expected an array of numbers");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "replan_radii[" + std::to_string(i) + "]";
      const double r = ObjectReader::as_number((*v)[i], path);
      if (!(r > 0.0)) ObjectReader::fail(path, "replan radius must be positive");
      sc.replan_radii.push_back(r);
    }
  }
  sc.output_dir = root.string("output_dir", sc.output_dir);
  root.finish();

  try {
    validate(sc.env);
  } catch (const InvalidEnvironment& e) {
    throw ScenarioError(e.what());
  }
  try {
    validate(sc.planner);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  for (std::size_t i = 0; i < sc.env.obstacles.size(); ++i)
    if (shape_contains(sc.env.obstacles[i].shape_at(0.0), sc.env.start))
      throw ScenarioError("start: inside obstacles[" + std::to_string(i) + "]");
  if (!steering_ok(sc.start.phi)) throw ScenarioError("start: steering angle at the tan() singularity");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": parse error: " + e.what());
  }
  return parse_scenario(doc, environment_overrides());
}

json to_json(const Scenario& sc) {
  json doc;
  doc["version"] = sc.version;
  doc["description"] = sc.description;
  doc["bounds"] = {{"min", vec2_json(sc.env.bounds.min)}, {"max", vec2_json(sc.env.bounds.max)}};
  doc["start"] = {sc.start.x, sc.start.y, sc.start.theta, sc.start.phi};
  doc["goal"] = {sc.goal.x, sc.goal.y, sc.goal.theta, sc.goal.phi};
  doc["obstacles"] = json::array();
  for (const auto& obs : sc.env.obstacles) {
    json o = shape_json(obs.shape);
    if (!obs.schedule.empty()) {
      o["schedule"] = json::array();
      for (const auto& e : obs.schedule) {
        json entry = shape_json(e.shape);
        entry["time"] = e.activation_time;
        o["schedule"].push_back(entry);
      }
    }
    doc["obstacles"].push_back(o);
  }
  const auto& pc = sc.planner;
  doc["dynamics"] = {{"wheelbase", pc.dynamics.wheelbase},
                     {"dt", pc.dynamics.dt},
                     {"noise_scale", {pc.dynamics.noise_scale.v, pc.dynamics.noise_scale.omega}}};
  doc["rrt"] = {{"gamma", pc.rrt.gamma},
                {"max_iters", pc.rrt.max_iters},
                {"goal_bias", pc.rrt.goal_bias},
                {"resolution", pc.rrt.resolution}};
  const auto& r = pc.mppi.control_penalty;
  doc["mppi"] = {{"samples", pc.mppi.samples},
                 {"horizon", pc.mppi.horizon},
                 {"lambda", pc.mppi.lambda},
                 {"sigma", {pc.mppi.sigma.v, pc.mppi.sigma.omega}},
                 {"control_penalty", {{r[0], r[1]}, {r[2], r[3]}}},
                 {"obstacle_penalty", pc.mppi.obstacle_penalty},
                 {"terminal_weight", pc.mppi.terminal_weight},
                 {"freeze_obstacles", pc.mppi.freeze_obstacles},
                 {"threads", pc.mppi.threads}};
  doc["gains"] = {{"v_max", pc.gains.v_max},
                  {"alpha", pc.gains.alpha},
                  {"k_p", pc.gains.k_p},
                  {"lookahead", pc.gains.lookahead}};
  doc["planner"] = {{"replan_radius", pc.replan_radius},
                    {"goal_tolerance", pc.goal_tolerance},
                    {"max_steps", pc.max_steps},
                    {"offline_plan_over_schedule", pc.offline_plan_over_schedule}};
  doc["modes"] = json::array();
  for (const auto& m : sc.modes) doc["modes"].push_back(to_string(m));
  doc["seeds"] = sc.seeds;
  doc["replan_radii"] = sc.replan_radii;
  doc["output_dir"] = sc.output_dir;
  return doc;
}

}  // namespace rrt_mppi

#include "blimpassist/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "blimpassist/error.hpp"
#include "blimpassist/text.hpp"

namespace blimpassist {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::InvalidScenario, path + ": " + why);
}

// Walks one JSON object, tracking which keys were consumed so leftovers can
// be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(label(), "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, at(key));
  }

  void integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) bad(at(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void vec2(const std::string& key, Vec2& out) {
    if (const json* v = find(key)) {
      const auto a = numbers(*v, at(key), 2);
      out = Vec2(a[0], a[1]);
    }
  }

  template <std::size_t N>
  void array(const std::string& key, std::array<double, N>& out) {
    if (const json* v = find(key)) {
      const auto a = numbers(*v, at(key), N);
      for (std::size_t i = 0; i < N; ++i) out[i] = a[i];
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) bad(at(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) bad(path, "expected a number");
    return v.get<double>();
  }

  static std::vector<double> numbers(const json& v, const std::string& path, std::size_t n) {
    if (!v.is_array() || v.size() != n) bad(path, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ReactionModel reaction_from_json(const json& j, const std::string& path) {
  ReactionModel rm;
  Fields f(j, path);
  f.number("min_gap", rm.min_gap);
  f.number("jitter", rm.jitter);
  f.finish();
  return rm;
}

json reaction_to_json(const ReactionModel& rm) {
  return {{"min_gap", rm.min_gap}, {"jitter", rm.jitter}};
}

}  // namespace

json to_json(const BlimpParams& p) {
  json j = json::object();
  for (std::size_t i = 0; i < kParamNames.size(); ++i) j[std::string(kParamNames[i])] = p.*kParamFields[i];
  return j;
}

json to_json(const ThrusterLayout& layout) {
  json positions = json::array();
  for (const Vec2& p : layout.positions) positions.push_back(vec(p));
  return {{"angles", layout.angles},
          {"positions", positions},
          {"vertical_offsets", layout.vertical_offsets},
          {"vertical_directions", layout.vertical_directions}};
}

json to_json(const ControllerConfig& c) {
  return {{"pid",
           {{"kp", c.pid.kp},
            {"ki", c.pid.ki},
            {"kd", c.pid.kd},
            {"integral_limit", c.pid.integral_limit},
            {"output_limit", c.pid.output_limit}}},
          {"bang_bang", {{"u", c.bang_bang.u}, {"deadband", c.bang_bang.deadband}}},
          {"supervisor",
           {{"t_balance", c.supervisor.t_balance},
            {"t_stabilize", c.supervisor.t_stabilize},
            {"reaction_window", c.supervisor.reaction_window}}},
          {"mapping",
           {{"theta_max", c.mapping.theta_max},
            {"f_vmax", c.mapping.f_vmax},
            {"yaw_gain", c.mapping.yaw_gain}}}};
}

json to_json(const BlimpState& s) {
  return {{"p_xy", vec(s.p_xy)}, {"z", s.z},
          {"v_xy", vec(s.v_xy)}, {"v_z", s.v_z},
          {"tilt", vec(s.tilt)}, {"tilt_rate", vec(s.tilt_rate)},
          {"psi", s.psi},        {"omega_z", s.omega_z},
          {"t", s.t}};
}

json to_json(const PilotSpec& spec) {
  struct Visitor {
    json operator()(const NullPilotSpec&) const { return {{"kind", "none"}}; }
    json operator()(const WaypointPilotSpec& s) const {
      json wps = json::array();
      for (const Vec3& w : s.plan.waypoints) wps.push_back(vec(w));
      return {{"kind", "waypoint"},
              {"waypoints", wps},
              {"capture_radius", s.plan.capture_radius},
              {"speed_scale", s.plan.speed_scale},
              {"reaction", reaction_to_json(s.reaction)}};
    }
    json operator()(const ChaoticPilotSpec& s) const {
      return {{"kind", "chaotic"}, {"reaction", reaction_to_json(s.reaction)}};
    }
    json operator()(const ReplayPilotSpec& s) const {
      return {{"kind", "replay"}, {"log", s.log.string()}};
    }
    json operator()(const InteractivePilotSpec&) const { return {{"kind", "interactive"}}; }
  };
  return std::visit(Visitor{}, spec);
}

json to_json(const Scenario& sc) {
  return {{"params", to_json(sc.params)},
          {"layout", to_json(sc.layout)},
          {"controller", to_json(sc.controller)},
          {"pilot", to_json(sc.pilot)},
          {"duration", sc.duration},
          {"dt", sc.dt},
          {"initial_state", to_json(sc.initial)},
          {"assist", sc.assist ? "on" : "off"},
          {"seed", sc.seed}};
}

json to_json(const MetricsReport& m) {
  return {{"rms_omega_z", m.rms_omega_z},
          {"rms_tilt_rate", m.rms_tilt_rate},
          {"peak_omega_z", m.peak_omega_z},
          {"task_completed", m.task_completed},
          {"completion_time", m.completion_time ? json(*m.completion_time) : json(nullptr)},
          {"path_rms_deviation", m.path_rms_deviation}};
}

json to_json(const ComparisonReport& r) {
  return {{"assist_on", to_json(r.assist_on)},
          {"assist_off", to_json(r.assist_off)},
          {"ratio_rms_omega_z", finite_or_null(r.ratio_rms_omega_z)},
          {"ratio_rms_tilt_rate", finite_or_null(r.ratio_rms_tilt_rate)},
          {"rng", r.rng}};
}

BlimpParams params_from_json(const json& j, const BlimpParams& base) {
  BlimpParams p = base;
  Fields f(j, "params");
  for (std::size_t i = 0; i < kParamNames.size(); ++i) f.number(std::string(kParamNames[i]), p.*kParamFields[i]);
  f.finish();
  return p;
}

ThrusterLayout layout_from_json(const json& j, const ThrusterLayout& base) {
  ThrusterLayout layout = base;
  Fields f(j, "layout");
  f.array("angles", layout.angles);
  if (const json* v = f.find("positions")) {
    if (!v->is_array() || v->size() != 4) bad("layout.positions", "expected 4 [x, y] pairs");
    for (std::size_t i = 0; i < 4; ++i) {
      const auto a = Fields::numbers((*v)[i], "layout.positions[" + std::to_string(i) + "]", 2);
      layout.positions[i] = Vec2(a[0], a[1]);
    }
  }
  f.array("vertical_offsets", layout.vertical_offsets);
  f.array("vertical_directions", layout.vertical_directions);
  f.finish();
  return layout;
}

ControllerConfig controller_from_json(const json& j, const ControllerConfig& base) {
  ControllerConfig c = base;
  Fields f(j, "controller");
  if (const json* v = f.find("pid")) {
    Fields g(*v, "controller.pid");
    g.number("kp", c.pid.kp);
    g.number("ki", c.pid.ki);
    g.number("kd", c.pid.kd);
    g.number("integral_limit", c.pid.integral_limit);
    g.number("output_limit", c.pid.output_limit);
    g.finish();
  }
  if (const json* v = f.find("bang_bang")) {
    Fields g(*v, "controller.bang_bang");
    g.number("u", c.bang_bang.u);
    g.number("deadband", c.bang_bang.deadband);
    g.finish();
  }
  if (const json* v = f.find("supervisor")) {
    Fields g(*v, "controller.supervisor");
    g.number("t_balance", c.supervisor.t_balance);
    g.number("t_stabilize", c.supervisor.t_stabilize);
    g.number("reaction_window", c.supervisor.reaction_window);
    g.finish();
  }
  if (const json* v = f.find("mapping")) {
    Fields g(*v, "controller.mapping");
    g.number("theta_max", c.mapping.theta_max);
    g.number("f_vmax", c.mapping.f_vmax);
    g.number("yaw_gain", c.mapping.yaw_gain);
    g.finish();
  }
  f.finish();
  return c;
}

BlimpState state_from_json(const json& j, const BlimpState& base) {
  BlimpState s = base;
  Fields f(j, "initial_state");
  f.vec2("p_xy", s.p_xy);
  f.number("z", s.z);
  f.vec2("v_xy", s.v_xy);
  f.number("v_z", s.v_z);
  f.vec2("tilt", s.tilt);
  f.vec2("tilt_rate", s.tilt_rate);
  f.number("psi", s.psi);
  f.number("omega_z", s.omega_z);
  f.number("t", s.t);
  f.finish();
  return s;
}

PilotSpec pilot_from_json(const json& j, const std::filesystem::path& base_dir) {
  Fields f(j, "pilot");
  const json* kind = f.find("kind");
  if (!kind || !kind->is_string()) bad("pilot.kind", "expected one of none|waypoint|chaotic|replay|interactive");
  const std::string k = kind->get<std::string>();
  PilotSpec spec;
  if (k == "none") {
    spec = NullPilotSpec{};
  } else if (k == "interactive") {
    spec = InteractivePilotSpec{};
  } else if (k == "chaotic") {
    ChaoticPilotSpec c;
    if (const json* v = f.find("reaction")) c.reaction = reaction_from_json(*v, "pilot.reaction");
    spec = c;
  } else if (k == "waypoint") {
    WaypointPilotSpec w;
    if (const json* v = f.find("waypoints")) {
      if (!v->is_array()) bad("pilot.waypoints", "expected an array of [x, y, z]");
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto a = Fields::numbers((*v)[i], "pilot.waypoints[" + std::to_string(i) + "]", 3);
        w.plan.waypoints.emplace_back(a[0], a[1], a[2]);
      }
    }
    f.number("capture_radius", w.plan.capture_radius);
    f.number("speed_scale", w.plan.speed_scale);
    if (const json* v = f.find("reaction")) w.reaction = reaction_from_json(*v, "pilot.reaction");
    spec = w;
  } else if (k == "replay") {
    ReplayPilotSpec r;
    const json* log = f.find("log");
    if (!log || !log->is_string()) bad("pilot.log", "expected a file path");
    r.log = std::filesystem::path(log->get<std::string>());
    if (r.log.is_relative() && !base_dir.empty()) r.log = base_dir / r.log;
    spec = r;
  } else {
    bad("pilot.kind", "unknown kind '" + k + "'");
  }
  f.finish();
  return spec;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  Scenario sc;
  Fields f(j, "");
  if (const json* v = f.find("params")) sc.params = params_from_json(*v);
  sc.layout = ThrusterLayout::x_configuration(sc.params.r3);
  if (const json* v = f.find("layout")) sc.layout = layout_from_json(*v, sc.layout);
  if (const json* v = f.find("controller")) sc.controller = controller_from_json(*v);
  if (const json* v = f.find("pilot")) sc.pilot = pilot_from_json(*v, base_dir);
  f.number("duration", sc.duration);
  f.number("dt", sc.dt);
  if (const json* v = f.find("initial_state")) sc.initial = state_from_json(*v);
  if (const json* v = f.find("assist")) {
    if (*v == "on") {
      sc.assist = true;
    } else if (*v == "off") {
      sc.assist = false;
    } else {
      bad("assist", "expected \"on\" or \"off\"");
    }
  }
  f.integer("seed", sc.seed);
  f.finish();
  return sc;
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport m;
  Fields f(j, "metrics");
  f.number("rms_omega_z", m.rms_omega_z);
  f.number("rms_tilt_rate", m.rms_tilt_rate);
  f.number("peak_omega_z", m.peak_omega_z);
  if (const json* v = f.find("task_completed")) m.task_completed = v->get<bool>();
  if (const json* v = f.find("completion_time"); v && !v->is_null()) {
    m.completion_time = Fields::as_number(*v, "metrics.completion_time");
  }
  f.number("path_rms_deviation", m.path_rms_deviation);
  f.finish();
  return m;
}

namespace {

json parse_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidScenario, path.string() + ": " + e.what());
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path, bool allow_interactive) {
  Scenario sc = scenario_from_json(parse_file(path), path.parent_path());
  validate(sc, allow_interactive);
  return sc;
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  write_text_file(path, to_json(sc).dump(2) + "\n");
}

BlimpParams load_params(const std::filesystem::path& path) {
  return validate_params(params_from_json(parse_file(path)));
}

}  // namespace blimpassist

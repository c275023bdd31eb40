#include "blimpassist/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "blimpassist/dynamics.hpp"
#include "blimpassist/error.hpp"
#include "blimpassist/text.hpp"

namespace blimpassist {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidScenario, field + ": " + why);
}

// Re-labels lower-level validation failures as scenario diagnostics.
template <typename F>
void check_section(const std::string& section, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidScenario) throw;
    invalid(section + "." + e.detail(), to_string(e.code()));
  }
}

}  // namespace

void validate(const Scenario& sc, bool allow_interactive) {
  if (!(sc.duration > 0.0) || !std::isfinite(sc.duration)) invalid("duration", "must be > 0");
  if (!(sc.dt > 0.0 && sc.dt <= kMaxStep)) invalid("dt", "must lie in (0, 0.02]");
  if (tick_count(sc) < 1) invalid("duration", "shorter than one tick");
  check_section("params", [&] { validate_params(sc.params); });
  check_section("layout", [&] { validate_layout(sc.layout); });
  check_section("controller", [&] { validate(sc.controller); });
  if (!is_finite(sc.initial)) invalid("initial_state", "non-finite value");
  if (!(sc.initial.tilt.cwiseAbs().maxCoeff() < std::numbers::pi / 2)) {
    invalid("initial_state.tilt", "|tilt| must be < pi/2");
  }
  if (const auto* wp = std::get_if<WaypointPilotSpec>(&sc.pilot)) {
    validate(wp->plan);
    validate(wp->reaction);
  } else if (const auto* ch = std::get_if<ChaoticPilotSpec>(&sc.pilot)) {
    validate(ch->reaction);
  } else if (const auto* rp = std::get_if<ReplayPilotSpec>(&sc.pilot)) {
    if (!std::filesystem::exists(rp->log)) invalid("pilot.log", "'" + rp->log.string() + "' not found");
  } else if (std::holds_alternative<InteractivePilotSpec>(sc.pilot) && !allow_interactive) {
    invalid("pilot.kind", "interactive pilots need a live session");
  }
}

std::int64_t tick_count(const Scenario& sc) { return std::llround(sc.duration / sc.dt); }

TraceRecord make_record(const BlimpState& s, const Wrench& w, const MotorCommand& m, Mode mode) {
  TraceRecord r;
  r.t = s.t;
  r.position = Vec3(s.p_xy.x(), s.p_xy.y(), s.z);
  r.velocity = Vec3(s.v_xy.x(), s.v_xy.y(), s.v_z);
  r.tilt = s.tilt;
  r.tilt_rate = s.tilt_rate;
  r.psi = s.psi;
  r.omega_z = s.omega_z;
  r.wrench = w;
  r.motors = m;
  r.mode = mode;
  return r;
}

Simulation::Simulation(const Scenario& sc)
    : scenario_((validate(sc, true), sc)),
      state_(sc.initial),
      controller_(sc.controller, sc.params, sc.assist),
      tick_(std::llround(sc.initial.t / sc.dt)) {}

double Simulation::now() const { return static_cast<double>(tick_) * scenario_.dt; }

TraceRecord Simulation::tick(const std::optional<PilotCommand>& command) {
  const double dt = scenario_.dt;
  const Wrench demand = controller_.step(command, state_, now(), dt);
  const Allocation alloc = allocate(demand, scenario_.layout, scenario_.params);
  const Wrench applied = wrench_of(alloc.command, scenario_.layout);
  BlimpState next = step_rk4(state_, applied, scenario_.params, dt);
  ++tick_;
  next.t = now();
  state_ = next;
  return make_record(state_, applied, alloc.command, controller_.mode());
}

void Simulation::restart(const BlimpState& initial, bool assist) {
  scenario_.initial = initial;
  scenario_.assist = assist;
  state_ = initial;
  controller_ = PilotAssist(scenario_.controller, scenario_.params, assist);
  tick_ = std::llround(initial.t / scenario_.dt);
}

Trace run_scenario(const Scenario& sc) {
  validate(sc);
  Simulation sim(sc);
  std::unique_ptr<Pilot> pilot = make_pilot(sc.pilot, sc.seed);
  const std::int64_t n = tick_count(sc);
  Trace tr;
  tr.records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const std::optional<PilotCommand> cmd = pilot->step(sim.now(), sim.state());
    tr.records.push_back(sim.tick(cmd));
  }
  return tr;
}

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

MetricsReport compute_metrics(const Trace& tr, const Scenario& sc) {
  if (tr.records.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no records");
  MetricsReport m;
  double sum_w2 = 0.0;
  double sum_r2 = 0.0;
  for (const TraceRecord& r : tr.records) {
    sum_w2 += r.omega_z * r.omega_z;
    sum_r2 += r.tilt_rate.squaredNorm();
    m.peak_omega_z = std::max(m.peak_omega_z, std::abs(r.omega_z));
  }
  const double n = static_cast<double>(tr.records.size());
  m.rms_omega_z = std::sqrt(sum_w2 / n);
  m.rms_tilt_rate = std::sqrt(sum_r2 / n);

  if (const auto* wp = std::get_if<WaypointPilotSpec>(&sc.pilot)) {
    const WaypointPlan& plan = wp->plan;
    if (!plan.waypoints.empty()) {
      const double start = tr.records.front().t - sc.dt;
      const Vec3& goal = plan.waypoints.back();
      std::size_t flown = tr.records.size();
      for (std::size_t i = 0; i < tr.records.size(); ++i) {
        const TraceRecord& r = tr.records[i];
        if ((r.position - goal).norm() <= plan.capture_radius) {
          m.task_completed = true;
          m.completion_time = r.t - start;
          flown = i + 1;
          break;
        }
      }
      std::vector<Vec3> polyline;
      polyline.emplace_back(sc.initial.p_xy.x(), sc.initial.p_xy.y(), sc.initial.z);
      polyline.insert(polyline.end(), plan.waypoints.begin(), plan.waypoints.end());
      // the course ends at capture; drift afterwards is not part of the path
      double sum_d2 = 0.0;
      for (std::size_t i = 0; i < flown; ++i) {
        const TraceRecord& r = tr.records[i];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
          best = std::min(best, point_segment_distance(r.position, polyline[i], polyline[i + 1]));
        }
        sum_d2 += best * best;
      }
      m.path_rms_deviation = std::sqrt(sum_d2 / static_cast<double>(flown));
    }
  }
  return m;
}

double metric_ratio(double on, double off) {
  if (off == 0.0) return on == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return on / off;
}

ComparisonReport compare(const Scenario& sc_on, const Scenario& sc_off) {
  if (!sc_on.assist || sc_off.assist) {
    throw Error(ErrorCode::ScenarioMismatch, "expected one assist-on and one assist-off scenario");
  }
  Scenario aligned = sc_off;
  aligned.assist = true;
  if (!(aligned == sc_on)) {
    throw Error(ErrorCode::ScenarioMismatch, "scenarios differ in more than the assist flag");
  }
  auto off_future = std::async(std::launch::async, [&] { return run_scenario(sc_off); });
  const Trace on_trace = run_scenario(sc_on);
  const Trace off_trace = off_future.get();

  ComparisonReport report;
  report.assist_on = compute_metrics(on_trace, sc_on);
  report.assist_off = compute_metrics(off_trace, sc_off);
  report.ratio_rms_omega_z = metric_ratio(report.assist_on.rms_omega_z, report.assist_off.rms_omega_z);
  report.ratio_rms_tilt_rate =
      metric_ratio(report.assist_on.rms_tilt_rate, report.assist_off.rms_tilt_rate);
  return report;
}

std::string format_trace_row(const TraceRecord& r) {
  const double values[] = {r.t,
                           r.position.x(), r.position.y(), r.position.z(),
                           r.velocity.x(), r.velocity.y(), r.velocity.z(),
                           r.tilt.x(), r.tilt.y(), r.tilt_rate.x(), r.tilt_rate.y(),
                           r.psi, r.omega_z,
                           r.wrench.f_xy.x(), r.wrench.f_xy.y(), r.wrench.f_z, r.wrench.tau_z,
                           r.motors.h[0], r.motors.h[1], r.motors.h[2], r.motors.h[3],
                           r.motors.v[0], r.motors.v[1]};
  std::string out;
  for (double v : values) {
    out += format_trace_number(v);
    out += ',';
  }
  out += to_string(r.mode);
  out += '\n';
  return out;
}

std::string format_trace(const Trace& tr) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : tr.records) out += format_trace_row(r);
  return out;
}

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader) {
    throw Error(ErrorCode::ParseError, "trace: missing or unexpected header");
  }
  Trace tr;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::string context = "trace line " + std::to_string(line_no);
    const auto fields = split(row, ',');
    if (fields.size() != 24) {
      throw Error(ErrorCode::ParseError, context + ": expected 24 fields, got " +
                                             std::to_string(fields.size()));
    }
    double v[23];
    for (int i = 0; i < 23; ++i) v[i] = parse_double(fields[i], context);
    TraceRecord r;
    r.t = v[0];
    r.position = Vec3(v[1], v[2], v[3]);
    r.velocity = Vec3(v[4], v[5], v[6]);
    r.tilt = Vec2(v[7], v[8]);
    r.tilt_rate = Vec2(v[9], v[10]);
    r.psi = v[11];
    r.omega_z = v[12];
    r.wrench.f_xy = Vec2(v[13], v[14]);
    r.wrench.f_z = v[15];
    r.wrench.tau_z = v[16];
    for (int i = 0; i < 4; ++i) r.motors.h[i] = v[17 + i];
    r.motors.v = {v[21], v[22]};
    try {
      r.mode = mode_from_string(trim(fields[23]));
    } catch (const Error&) {
      throw Error(ErrorCode::ParseError, context + ": unknown mode '" + std::string(fields[23]) + "'");
    }
    if (!tr.records.empty() && !(r.t > tr.records.back().t)) {
      throw Error(ErrorCode::ParseError, context + ": time not strictly increasing");
    }
    tr.records.push_back(r);
  }
  return tr;
}

void write_trace(const Trace& tr, const std::filesystem::path& path) {
  write_text_file(path, format_trace(tr));
}

Trace read_trace(const std::filesystem::path& path) { return parse_trace(read_text_file(path)); }

}  // namespace blimpassist

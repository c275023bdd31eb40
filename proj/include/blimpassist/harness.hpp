#pragma once

// Headless closed loop: pilot -> controller -> allocation -> plant.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blimpassist/actuation.hpp"
#include "blimpassist/controllers.hpp"
#include "blimpassist/model.hpp"
#include "blimpassist/pilot.hpp"

namespace blimpassist {

struct Scenario {
  BlimpParams params;
  ThrusterLayout layout = ThrusterLayout::x_configuration(BlimpParams{}.r3);
  ControllerConfig controller;
  PilotSpec pilot = NullPilotSpec{};
  double duration = 30.0;
  double dt = 0.01;
  BlimpState initial;
  bool assist = true;
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Throws InvalidScenario; the detail names the offending field. With
/// `allow_interactive` the pilot may be a live-session placeholder.
void validate(const Scenario& sc, bool allow_interactive = false);

std::int64_t tick_count(const Scenario& sc);

struct TraceRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec2 tilt = Vec2::Zero();
  Vec2 tilt_rate = Vec2::Zero();
  double psi = 0.0;
  double omega_z = 0.0;
  /// Wrench realized by the motors (after saturation).
  Wrench wrench;
  MotorCommand motors;
  Mode mode = Mode::Idle;

  bool operator==(const TraceRecord&) const = default;
};

struct Trace {
  std::vector<TraceRecord> records;

  bool operator==(const Trace&) const = default;
};

/// Owns the plant state and controller for one run. Tick k covers
/// [k dt, (k+1) dt]; times are computed from the tick index so that runs
/// started from the same tick reproduce bit for bit.
class Simulation {
 public:
  explicit Simulation(const Scenario& sc);

  /// Applies an optional command at the start of the tick and advances one dt.
  TraceRecord tick(const std::optional<PilotCommand>& command);

  /// Time at the start of the next tick.
  double now() const;
  std::int64_t tick_index() const { return tick_; }
  const BlimpState& state() const { return state_; }
  const PilotAssist& controller() const { return controller_; }
  const Scenario& scenario() const { return scenario_; }

  /// Restarts from `initial` with the given assist flag; controller memory
  /// is cleared.
  void restart(const BlimpState& initial, bool assist);

 private:
  Scenario scenario_;
  BlimpState state_;
  PilotAssist controller_;
  std::int64_t tick_ = 0;
};

TraceRecord make_record(const BlimpState& s, const Wrench& w, const MotorCommand& m, Mode mode);

/// Runs the scenario's pilot in closed loop. Throws InvalidScenario.
Trace run_scenario(const Scenario& sc);

struct MetricsReport {
  double rms_omega_z = 0.0;
  /// RMS magnitude of the tilt-rate vector; stands in for sway rate.
  double rms_tilt_rate = 0.0;
  double peak_omega_z = 0.0;
  bool task_completed = false;
  /// Seconds from the start of the run to the first capture of the final
  /// waypoint.
  std::optional<double> completion_time;
  /// RMS distance from the polyline start -> waypoints up to the capture of
  /// the final waypoint (0 without a plan).
  double path_rms_deviation = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

/// Throws EmptyTrace. Waypoint metrics use the scenario's waypoint plan, if
/// any; the run start is taken one dt before the first record.
MetricsReport compute_metrics(const Trace& tr, const Scenario& sc);

struct ComparisonReport {
  MetricsReport assist_on;
  MetricsReport assist_off;
  /// on/off; 1 when both are zero, +inf when only the baseline is zero.
  double ratio_rms_omega_z = 1.0;
  double ratio_rms_tilt_rate = 1.0;
  std::string rng = kRngAlgorithm;
};

double metric_ratio(double on, double off);

/// Runs both scenarios (concurrently) and compares them. Throws
/// ScenarioMismatch unless sc_on has assist on, sc_off has it off, and the
/// two are otherwise identical.
ComparisonReport compare(const Scenario& sc_on, const Scenario& sc_off);

inline constexpr const char* kTraceHeader =
    "t,x,y,z,vx,vy,vz,tilt_x,tilt_y,tiltrate_x,tiltrate_y,psi,omega_z,fx,fy,fz,tau_z,"
    "m1,m2,m3,m4,m5,m6,mode";

/// One CSV line, newline included.
std::string format_trace_row(const TraceRecord& r);
std::string format_trace(const Trace& tr);
Trace parse_trace(const std::string& text);
/// IO failures carry the path in the error detail.
void write_trace(const Trace& tr, const std::filesystem::path& path);
Trace read_trace(const std::filesystem::path& path);

}  // namespace blimpassist

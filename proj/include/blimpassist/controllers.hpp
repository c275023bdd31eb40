#pragma once

#include <optional>
#include <string_view>

#include "blimpassist/model.hpp"

namespace blimpassist {

struct PidGains {
  double kp = 1.5;              // N/rad
  double ki = 0.3;              // N/(rad s)
  double kd = 0.4;              // N s/rad
  double integral_limit = 0.5;  // rad s
  double output_limit = 1.2;    // N

  bool operator==(const PidGains&) const = default;
};

/// Per-axis PID memory.
struct PidState {
  Vec2 integral = Vec2::Zero();
  Vec2 prev_error = Vec2::Zero();

  bool operator==(const PidState&) const = default;
};

struct BangBangConfig {
  double u = 0.01;         // N m
  double deadband = 0.02;  // rad/s

  bool operator==(const BangBangConfig&) const = default;
};

struct SupervisorConfig {
  double t_balance = 0.100;
  double t_stabilize = 0.100;
  double reaction_window = 0.200;

  bool operator==(const SupervisorConfig&) const = default;
};

/// Stick-to-setpoint scaling shared by the assisted and direct paths.
struct CommandMapping {
  double theta_max = 0.15;  // rad per unit planar input
  double f_vmax = 0.4;      // N per unit vertical input
  double yaw_gain = 0.005;  // N m per unit yaw input; 0 disables yaw input

  bool operator==(const CommandMapping&) const = default;
};

struct ControllerConfig {
  PidGains pid;
  BangBangConfig bang_bang;
  SupervisorConfig supervisor;
  CommandMapping mapping;

  bool operator==(const ControllerConfig&) const = default;
};

/// Throws InvalidConfig naming the first offending field.
void validate(const ControllerConfig& cfg);

/// Off is only reported by the unassisted path.
enum class Mode { Idle, Balancing, Stabilizing, Off };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);

struct SupervisorState {
  Mode mode = Mode::Idle;
  double phase_deadline = 0.0;
  std::optional<PilotCommand> active_command;
  /// Translational output of the last balancing tick; tau_z is always 0.
  Wrench held_wrench;
  /// Time of the previous step, for the monotone-clock check.
  std::optional<double> last_time;

  bool operator==(const SupervisorState&) const = default;
};

/// Deadline comparisons tolerate tick times accumulated in floating point.
inline constexpr double kTimeEpsilon = 1e-9;

Vec2 command_to_tilt_target(const PilotCommand& c, double theta_max);

struct BalancingOutput {
  Vec2 force = Vec2::Zero();
  PidState state;
};

/// Balanced-pitch feedforward plus PID on the tilt error, per axis. The
/// derivative acts on the measured tilt rate; the integral is clamped to
/// integral_limit and the output to output_limit.
BalancingOutput balancing_step(const Vec2& target, const BlimpState& s, const PidGains& gains,
                               const PidState& st, double dt, const BlimpParams& p);

/// -u for positive yaw rate, +u for negative, 0 inside the deadband.
double bang_bang_step(double omega_z, const BangBangConfig& cfg);

/// Vertical demand from the stick minus the Bernoulli descent force.
double vertical_feedforward(const PilotCommand& c, const BlimpState& s, const BlimpParams& p,
                            double f_vmax);

struct SupervisorOutput {
  Wrench wrench;
  SupervisorState state;
  PidState pid;
  /// Mode after deadline transitions but before the incoming command.
  Mode mode_before_command = Mode::Idle;
};

/// One tick of the preemptive supervisor.
///
/// Order within a tick: deadline and deadband transitions are applied for
/// `now`, then an incoming command preempts whatever mode is active (new
/// balancing window, PID memory cleared), then the active mode produces the
/// wrench. Throws NonMonotoneClock if `now` precedes the previous call.
SupervisorOutput supervisor_step(const SupervisorState& sup,
                                 const std::optional<PilotCommand>& incoming,
                                 const BlimpState& s, double now, double dt,
                                 const ControllerConfig& cfg, const PidState& pid,
                                 const BlimpParams& p);

SupervisorState reset(const SupervisorState& sup);

/// Unassisted mapping: tilt-target feedforward thrust, raw vertical and yaw
/// inputs, held until the next command. No PID, stabilizer or windows.
Wrench passthrough_wrench(const PilotCommand& c, const CommandMapping& mapping,
                          const BlimpParams& p);

/// Stateful wrapper used by the simulation loop. Dispatches to the
/// supervisor when assist is on and to the direct mapping otherwise.
class PilotAssist {
 public:
  PilotAssist(ControllerConfig cfg, BlimpParams params, bool assist);

  Wrench step(const std::optional<PilotCommand>& incoming, const BlimpState& s, double now,
              double dt);
  void reset();

  bool assist() const { return assist_; }
  Mode mode() const { return assist_ ? supervisor_.mode : Mode::Off; }
  Mode mode_before_command() const { return mode_before_command_; }
  const SupervisorState& supervisor() const { return supervisor_; }
  const PidState& pid() const { return pid_; }

 private:
  ControllerConfig cfg_;
  BlimpParams params_;
  bool assist_;
  SupervisorState supervisor_;
  PidState pid_;
  Wrench direct_;
  Mode mode_before_command_ = Mode::Idle;
};

}  // namespace blimpassist

#include "blimpassist/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "blimpassist/dynamics.hpp"
#include "blimpassist/error.hpp"

namespace blimpassist {

namespace {

void require(bool ok, const char* field) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, field);
}

}  // namespace

void validate(const ControllerConfig& cfg) {
  const auto& pid = cfg.pid;
  require(pid.kp >= 0.0, "pid.kp");
  require(pid.ki >= 0.0, "pid.ki");
  require(pid.kd >= 0.0, "pid.kd");
  require(pid.integral_limit > 0.0, "pid.integral_limit");
  require(pid.output_limit > 0.0, "pid.output_limit");
  require(cfg.bang_bang.u > 0.0, "bang_bang.u");
  require(cfg.bang_bang.deadband >= 0.0, "bang_bang.deadband");
  const auto& sup = cfg.supervisor;
  require(sup.t_balance > 0.0, "supervisor.t_balance");
  require(sup.t_stabilize > 0.0, "supervisor.t_stabilize");
  require(sup.t_balance + sup.t_stabilize <= sup.reaction_window + kTimeEpsilon,
          "supervisor.reaction_window");
  const auto& map = cfg.mapping;
  require(map.theta_max > 0.0 && map.theta_max < std::numbers::pi / 2, "mapping.theta_max");
  require(map.f_vmax > 0.0, "mapping.f_vmax");
  require(map.yaw_gain >= 0.0, "mapping.yaw_gain");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Idle: return "idle";
    case Mode::Balancing: return "balancing";
    case Mode::Stabilizing: return "stabilizing";
    case Mode::Off: return "off";
  }
  return "idle";
}

Mode mode_from_string(std::string_view text) {
  if (text == "idle") return Mode::Idle;
  if (text == "balancing") return Mode::Balancing;
  if (text == "stabilizing") return Mode::Stabilizing;
  if (text == "off") return Mode::Off;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

Vec2 command_to_tilt_target(const PilotCommand& c, double theta_max) { return theta_max * c.dir; }

BalancingOutput balancing_step(const Vec2& target, const BlimpState& s, const PidGains& gains,
                               const PidState& st, double dt, const BlimpParams& p) {
  BalancingOutput out;
  for (int i = 0; i < 2; ++i) {
    const double error = target[i] - s.tilt[i];
    const double integral =
        std::clamp(st.integral[i] + error * dt, -gains.integral_limit, gains.integral_limit);
    const double feedforward = thrust_for_balanced_pitch(target[i], p);
    const double force = feedforward + gains.kp * error + gains.ki * integral -
                         gains.kd * s.tilt_rate[i];
    out.force[i] = std::clamp(force, -gains.output_limit, gains.output_limit);
    out.state.integral[i] = integral;
    out.state.prev_error[i] = error;
  }
  return out;
}

double bang_bang_step(double omega_z, const BangBangConfig& cfg) {
  if (std::abs(omega_z) < cfg.deadband || omega_z == 0.0) return 0.0;
  return omega_z > 0.0 ? -cfg.u : cfg.u;
}

double vertical_feedforward(const PilotCommand& c, const BlimpState& s, const BlimpParams& p,
                            double f_vmax) {
  return c.vz * f_vmax - bernoulli_force(s.v_xy, p);
}

SupervisorOutput supervisor_step(const SupervisorState& sup,
                                 const std::optional<PilotCommand>& incoming,
                                 const BlimpState& s, double now, double dt,
                                 const ControllerConfig& cfg, const PidState& pid,
                                 const BlimpParams& p) {
  if (sup.last_time && now < *sup.last_time) {
    throw Error(ErrorCode::NonMonotoneClock,
                "now=" + std::to_string(now) + " < previous " + std::to_string(*sup.last_time));
  }
  SupervisorOutput out;
  out.state = sup;
  out.state.last_time = now;
  out.pid = pid;
  SupervisorState& st = out.state;
  const double deadband = cfg.bang_bang.deadband;

  // timed transitions
  if (st.mode == Mode::Balancing && now >= st.phase_deadline - kTimeEpsilon) {
    st.mode = Mode::Stabilizing;
    st.phase_deadline = now + cfg.supervisor.t_stabilize;
  } else if (st.mode == Mode::Stabilizing && now >= st.phase_deadline - kTimeEpsilon) {
    st.mode = Mode::Idle;
  }
  if (st.mode == Mode::Stabilizing && std::abs(s.omega_z) < deadband) {
    st.mode = Mode::Idle;
  }
  if (st.mode == Mode::Idle) st.active_command.reset();
  out.mode_before_command = st.mode;

  // preemption from any mode
  if (incoming) {
    st.mode = Mode::Balancing;
    st.phase_deadline = now + cfg.supervisor.t_balance;
    st.active_command = clamp_command(*incoming);
    out.pid = PidState{};
  }

  switch (st.mode) {
    case Mode::Balancing: {
      const PilotCommand& c = *st.active_command;
      const Vec2 target = command_to_tilt_target(c, cfg.mapping.theta_max);
      const BalancingOutput bal = balancing_step(target, s, cfg.pid, out.pid, dt, p);
      out.pid = bal.state;
      out.wrench.f_xy = bal.force;
      out.wrench.f_z = vertical_feedforward(c, s, p, cfg.mapping.f_vmax);
      out.wrench.tau_z = cfg.mapping.yaw_gain * c.yaw;
      st.held_wrench = out.wrench;
      st.held_wrench.tau_z = 0.0;
      break;
    }
    case Mode::Stabilizing:
      out.wrench = st.held_wrench;
      out.wrench.tau_z = bang_bang_step(s.omega_z, cfg.bang_bang);
      break;
    case Mode::Idle:
    case Mode::Off:
      out.wrench = st.held_wrench;
      out.wrench.tau_z = 0.0;
      break;
  }
  return out;
}

SupervisorState reset(const SupervisorState&) { return SupervisorState{}; }

Wrench passthrough_wrench(const PilotCommand& c, const CommandMapping& mapping,
                          const BlimpParams& p) {
  const PilotCommand cmd = clamp_command(c);
  const Vec2 target = command_to_tilt_target(cmd, mapping.theta_max);
  Wrench w;
  w.f_xy = Vec2(thrust_for_balanced_pitch(target.x(), p), thrust_for_balanced_pitch(target.y(), p));
  w.f_z = cmd.vz * mapping.f_vmax;
  w.tau_z = mapping.yaw_gain * cmd.yaw;
  return w;
}

PilotAssist::PilotAssist(ControllerConfig cfg, BlimpParams params, bool assist)
    : cfg_(cfg), params_(params), assist_(assist) {
  validate(cfg_);
  validate_params(params_);
}

Wrench PilotAssist::step(const std::optional<PilotCommand>& incoming, const BlimpState& s,
                         double now, double dt) {
  if (!assist_) {
    mode_before_command_ = Mode::Off;
    if (incoming) direct_ = passthrough_wrench(*incoming, cfg_.mapping, params_);
    return direct_;
  }
  SupervisorOutput out = supervisor_step(supervisor_, incoming, s, now, dt, cfg_, pid_, params_);
  supervisor_ = std::move(out.state);
  pid_ = out.pid;
  mode_before_command_ = out.mode_before_command;
  return out.wrench;
}

void PilotAssist::reset() {
  supervisor_ = blimpassist::reset(supervisor_);
  pid_ = PidState{};
  direct_ = Wrench{};
  mode_before_command_ = assist_ ? Mode::Idle : Mode::Off;
}

}  // namespace blimpassist

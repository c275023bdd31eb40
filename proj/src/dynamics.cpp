#include "blimpassist/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace blimpassist {

double balanced_pitch_for_thrust(double thrust, const BlimpParams& p) {
  const double arg = thrust * p.r2 / (p.r1 * p.m * p.g);
  if (!(std::abs(arg) <= 1.0)) {
    throw Error(ErrorCode::ThrustExceedsBalanceRange,
                "|F r2 / (r1 m g)| = " + std::to_string(std::abs(arg)) + " > 1");
  }
  return std::asin(arg);
}

double thrust_for_balanced_pitch(double tilt, const BlimpParams& p) {
  if (!(std::abs(tilt) < std::numbers::pi / 2)) {
    throw Error(ErrorCode::TiltOutOfRange, "|tilt| = " + std::to_string(std::abs(tilt)));
  }
  return (p.r1 / p.r2) * p.m * p.g * std::sin(tilt);
}

double bernoulli_force(const Vec2& v_xy, const BlimpParams& p) {
  return p.kb * v_xy.squaredNorm();
}

double yaw_damping(const BlimpParams& p) { return p.Dh * p.r3 * p.r3 + p.Dwz; }

namespace flat {

State<double> pack(const BlimpState& s) {
  State<double> x;
  x << s.p_xy.x(), s.p_xy.y(), s.z, s.v_xy.x(), s.v_xy.y(), s.v_z, s.tilt.x(), s.tilt.y(),
      s.tilt_rate.x(), s.tilt_rate.y(), s.psi, s.omega_z;
  return x;
}

BlimpState unpack(const State<double>& x, double t) {
  BlimpState s;
  s.p_xy = Vec2(x[0], x[1]);
  s.z = x[2];
  s.v_xy = Vec2(x[3], x[4]);
  s.v_z = x[5];
  s.tilt = Vec2(x[6], x[7]);
  s.tilt_rate = Vec2(x[8], x[9]);
  s.psi = x[10];
  s.omega_z = x[11];
  s.t = t;
  return s;
}

Input<double> pack(const Wrench& w) {
  Input<double> u;
  u << w.f_xy.x(), w.f_xy.y(), w.f_z, w.tau_z;
  return u;
}

}  // namespace flat

StateDerivative derivative(const BlimpState& s, const Wrench& w, const BlimpParams& p) {
  const flat::State<double> dx = flat::rhs<double>(flat::pack(s), flat::pack(w), p);
  StateDerivative d;
  d.p_xy = Vec2(dx[0], dx[1]);
  d.z = dx[2];
  d.v_xy = Vec2(dx[3], dx[4]);
  d.v_z = dx[5];
  d.tilt = Vec2(dx[6], dx[7]);
  d.tilt_rate = Vec2(dx[8], dx[9]);
  d.psi = dx[10];
  d.omega_z = dx[11];
  return d;
}

BlimpState step_rk4(const BlimpState& s, const Wrench& w, const BlimpParams& p, double dt) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw Error(ErrorCode::InvalidConfig, "dt must lie in (0, " + std::to_string(kMaxStep) + "]");
  }
  return flat::unpack(flat::rk4<double>(flat::pack(s), flat::pack(w), p, dt), s.t + dt);
}

double closed_form_yaw(double omega0, double tau_z, const BlimpParams& p, double t) {
  const double c = yaw_damping(p);
  const double steady = tau_z / c;
  return steady + (omega0 - steady) * std::exp(-c * t / p.Iz);
}

double rotational_energy(double omega_z, const BlimpParams& p) {
  return 0.5 * p.Iz * omega_z * omega_z;
}

}  // namespace blimpassist

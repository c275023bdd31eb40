#pragma once

// Reduced motion model: balanced pitch algebra, coupled translation with a
// damped tilt pendulum, Bernoulli descent coupling, and first-order yaw.
//
// Implemented right-hand side (per planar axis i):
//   m  dv_i/dt        = f_i cos(tilt_i) - Dh v_i
//   m  dv_z/dt        = f_z - sum_i f_i sin(tilt_i) - Dz v_z + kb |v_xy|^2
//   Iy dtilt_rate_i/dt = f_i r2 - m g r1 sin(tilt_i) - Dwy tilt_rate_i
//   Iz domega_z/dt    = tau_z - (Dh r3^2 + Dwz) omega_z
// The tilt equation's only equilibrium is f = (r1/r2) m g sin(tilt).

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "blimpassist/error.hpp"
#include "blimpassist/model.hpp"

namespace blimpassist {

struct StateDerivative {
  Vec2 p_xy = Vec2::Zero();
  double z = 0.0;
  Vec2 v_xy = Vec2::Zero();
  double v_z = 0.0;
  Vec2 tilt = Vec2::Zero();
  Vec2 tilt_rate = Vec2::Zero();
  double psi = 0.0;
  double omega_z = 0.0;
};

/// Equilibrium tilt for a steady horizontal thrust. Throws
/// ThrustExceedsBalanceRange when |F r2 / (r1 m g)| > 1.
double balanced_pitch_for_thrust(double thrust, const BlimpParams& p);

/// Inverse of balanced_pitch_for_thrust. Throws TiltOutOfRange for
/// |tilt| >= pi/2.
double thrust_for_balanced_pitch(double tilt, const BlimpParams& p);

/// Downward (+z) force from flow over the envelope: kb |v_xy|^2.
double bernoulli_force(const Vec2& v_xy, const BlimpParams& p);

/// Lumped yaw damping Dh r3^2 + Dwz.
double yaw_damping(const BlimpParams& p);

StateDerivative derivative(const BlimpState& s, const Wrench& w, const BlimpParams& p);

/// One classical RK4 step with the wrench held over dt. Requires
/// 0 < dt <= 0.02; propagates ModelRegionViolation from any stage.
BlimpState step_rk4(const BlimpState& s, const Wrench& w, const BlimpParams& p, double dt);

/// Exact yaw-rate solution under constant torque.
double closed_form_yaw(double omega0, double tau_z, const BlimpParams& p, double t);

double rotational_energy(double omega_z, const BlimpParams& p);

inline constexpr double kMaxStep = 0.02;

// Flat-vector form used by the integrator. Layout:
// [px, py, z, vx, vy, vz, tilt_x, tilt_y, rate_x, rate_y, psi, omega_z]
namespace flat {

template <typename Scalar>
using State = Eigen::Matrix<Scalar, 12, 1>;

// [fx, fy, fz, tau_z]
template <typename Scalar>
using Input = Eigen::Matrix<Scalar, 4, 1>;

State<double> pack(const BlimpState& s);
BlimpState unpack(const State<double>& x, double t);
Input<double> pack(const Wrench& w);

template <typename Scalar>
State<Scalar> rhs(const State<Scalar>& x, const Input<Scalar>& u, const BlimpParams& p) {
  using std::cos;
  using std::sin;
  using std::abs;
  const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
  if (!(abs(x[6]) < half_pi) || !(abs(x[7]) < half_pi)) {
    throw Error(ErrorCode::ModelRegionViolation, "|tilt| >= pi/2");
  }
  const Scalar m(p.m), g(p.g), r1(p.r1), r2(p.r2), r3(p.r3);
  const Scalar Dh(p.Dh), Dz(p.Dz), Dwz(p.Dwz), Dwy(p.Dwy), Iz(p.Iz), Iy(p.Iy), kb(p.kb);

  State<Scalar> dx;
  dx[0] = x[3];
  dx[1] = x[4];
  dx[2] = x[5];
  Scalar lift(0);
  for (int i = 0; i < 2; ++i) {
    const Scalar f = u[i];
    const Scalar tilt = x[6 + i];
    dx[3 + i] = (f * cos(tilt) - Dh * x[3 + i]) / m;
    lift += f * sin(tilt);
    dx[6 + i] = x[8 + i];
    dx[8 + i] = (f * r2 - m * g * r1 * sin(tilt) - Dwy * x[8 + i]) / Iy;
  }
  const Scalar bernoulli = kb * (x[3] * x[3] + x[4] * x[4]);
  dx[5] = (u[2] - lift - Dz * x[5] + bernoulli) / m;
  dx[10] = x[11];
  dx[11] = (u[3] - (Dh * r3 * r3 + Dwz) * x[11]) / Iz;
  return dx;
}

template <typename Scalar>
State<Scalar> rk4(const State<Scalar>& x, const Input<Scalar>& u, const BlimpParams& p, Scalar dt) {
  const State<Scalar> k1 = rhs<Scalar>(x, u, p);
  const State<Scalar> k2 = rhs<Scalar>(x + (dt / 2) * k1, u, p);
  const State<Scalar> k3 = rhs<Scalar>(x + (dt / 2) * k2, u, p);
  const State<Scalar> k4 = rhs<Scalar>(x + dt * k3, u, p);
  return x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace flat

}  // namespace blimpassist

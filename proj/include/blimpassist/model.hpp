#pragma once

// Shared domain types for the reduced blimp model.
//
// Frames: +z points along gravity, so altitude grows downward and a
// positive vertical force pushes the blimp down. Planar quantities are
// 2-vectors; the tilt vector holds one pendulum-like lean per planar axis.

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace blimpassist {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct BlimpParams {
  double m = 0.30;      // kg
  double g = 9.81;      // m/s^2
  double r1 = 0.15;     // CG to center of buoyancy (m)
  double r2 = 0.05;     // thrusters to center of buoyancy, vertical (m)
  double r3 = 0.04;     // thruster to gondola center, horizontal (m)
  double Dh = 0.5;      // horizontal linear drag (N s/m)
  double Dz = 0.10;     // vertical linear drag (N s/m)
  double Dwz = 5.0e-4;  // yaw rotational drag (N m s)
  double Dwy = 2.0e-3;  // tilt rotational drag (N m s)
  double Iz = 0.01;     // yaw inertia (kg m^2)
  double Iy = 0.012;    // tilt inertia (kg m^2)
  double kb = 0.02;     // Bernoulli coupling (N s^2/m^2)
  double t_max = 1.5;   // per-motor thrust limit (N)

  bool operator==(const BlimpParams&) const = default;
};

/// Field names in declaration order; also the JSON keys.
inline constexpr std::array<std::string_view, 13> kParamNames = {
    "m", "g", "r1", "r2", "r3", "Dh", "Dz", "Dwz", "Dwy", "Iz", "Iy", "kb", "t_max"};

/// Pointer-to-member table matching kParamNames.
inline constexpr std::array<double BlimpParams::*, 13> kParamFields = {
    &BlimpParams::m,   &BlimpParams::g,   &BlimpParams::r1,  &BlimpParams::r2, &BlimpParams::r3,
    &BlimpParams::Dh,  &BlimpParams::Dz,  &BlimpParams::Dwz, &BlimpParams::Dwy, &BlimpParams::Iz,
    &BlimpParams::Iy,  &BlimpParams::kb,  &BlimpParams::t_max};

struct BlimpState {
  Vec2 p_xy = Vec2::Zero();
  double z = 0.0;
  Vec2 v_xy = Vec2::Zero();
  double v_z = 0.0;
  Vec2 tilt = Vec2::Zero();
  Vec2 tilt_rate = Vec2::Zero();
  double psi = 0.0;
  double omega_z = 0.0;
  double t = 0.0;

  bool operator==(const BlimpState&) const = default;
};

/// Body-frame force/torque demand ahead of motor allocation.
struct Wrench {
  Vec2 f_xy = Vec2::Zero();
  double f_z = 0.0;
  double tau_z = 0.0;

  bool operator==(const Wrench&) const = default;
};

/// Four horizontal and two vertical forward-only thrusts (N).
struct MotorCommand {
  std::array<double, 4> h{};
  std::array<double, 2> v{};

  bool operator==(const MotorCommand&) const = default;
};

struct PilotCommand {
  Vec2 dir = Vec2::Zero();
  double vz = 0.0;
  double yaw = 0.0;
  double t_issued = 0.0;

  bool operator==(const PilotCommand&) const = default;
};

/// Throws Error(NonPositiveParameter, field) on the first field that is not
/// strictly positive (NaN included). Returns the input otherwise.
const BlimpParams& validate_params(const BlimpParams& p);

/// Component-wise clamp of dir, vz and yaw to [-1, 1]. NaN inputs map to 0.
PilotCommand clamp_command(const PilotCommand& raw);

bool is_finite(const BlimpState& s);
bool is_finite(const Wrench& w);

}  // namespace blimpassist

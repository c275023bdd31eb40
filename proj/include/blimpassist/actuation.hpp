#pragma once

#include <array>

#include "blimpassist/model.hpp"

namespace blimpassist {

/// Geometry of the X-shaped gondola.
///
/// Horizontal thruster i pushes along (cos angles[i], sin angles[i]) and is
/// mounted at positions[i]. The default mounts each thruster on the arm 90
/// degrees away from its pointing direction, alternating sides, so that two
/// thrusters yaw the gondola each way and every planar direction is reachable
/// with forward-only motors.
///
/// Vertical thruster j pushes along +z when vertical_directions[j] is +1 and
/// along -z when it is -1. The default pair is opposed so both climb and
/// descent are available.
struct ThrusterLayout {
  std::array<double, 4> angles{};
  std::array<Vec2, 4> positions{};
  std::array<double, 2> vertical_offsets{};
  std::array<double, 2> vertical_directions{1.0, -1.0};

  static ThrusterLayout x_configuration(double r3);

  bool operator==(const ThrusterLayout&) const = default;
};

/// Throws InvalidConfig if the pointing directions do not cancel, the
/// mounting radii differ, or a vertical direction is not +-1.
void validate_layout(const ThrusterLayout& layout);

struct Allocation {
  MotorCommand command;
  bool saturated = false;
  /// Radial factor applied to the demanded horizontal wrench (1 when feasible).
  double scale = 1.0;
};

/// Minimum sum-of-squares non-negative thrusts realizing the wrench.
///
/// The horizontal subproblem (f_x, f_y, tau_z) is solved exactly by
/// enumerating the 15 non-empty support sets. Demands beyond t_max are
/// scaled down radially; demands outside the thrust cone (only possible with
/// degenerate custom layouts) fall back to the least-residual solution.
/// Vertical demand is split equally across the motors co-directed with it.
Allocation allocate(const Wrench& w, const ThrusterLayout& layout, const BlimpParams& p);

Wrench wrench_of(const MotorCommand& cmd, const ThrusterLayout& layout);

}  // namespace blimpassist

#include "blimpassist/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "blimpassist/error.hpp"

namespace blimpassist {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 direction(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

// Columns map thrusts to (f_x, f_y, tau_z).
Eigen::Matrix<double, 3, 4> horizontal_map(const ThrusterLayout& layout) {
  Eigen::Matrix<double, 3, 4> a;
  for (int i = 0; i < 4; ++i) {
    const Vec2 d = direction(layout.angles[i]);
    a(0, i) = d.x();
    a(1, i) = d.y();
    a(2, i) = cross(layout.positions[i], d);
  }
  return a;
}

struct Candidate {
  Eigen::Vector4d thrust = Eigen::Vector4d::Zero();
  double residual = std::numeric_limits<double>::infinity();
  double norm = std::numeric_limits<double>::infinity();
};

// Exhaustive active-set NNLS: for every support set take the minimum-norm
// least-squares solution and keep the best non-negative one.
Candidate solve_horizontal(const Eigen::Matrix<double, 3, 4>& a, const Eigen::Vector3d& b) {
  const double tol = 1e-12 * (1.0 + b.norm());
  Candidate best;
  best.thrust.setZero();
  best.residual = b.norm();
  best.norm = 0.0;
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::array<int, 4> cols{};
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1u << i)) cols[k++] = i;
    }
    Eigen::MatrixXd sub(3, k);
    for (int j = 0; j < k; ++j) sub.col(j) = a.col(cols[j]);
    const Eigen::VectorXd x = sub.completeOrthogonalDecomposition().solve(b);
    if ((x.array() < -tol).any()) continue;

    Candidate c;
    for (int j = 0; j < k; ++j) c.thrust[cols[j]] = std::max(0.0, x[j]);
    c.residual = (a * c.thrust - b).norm();
    c.norm = c.thrust.squaredNorm();

    const bool better_fit = c.residual < best.residual - tol;
    const bool same_fit = std::abs(c.residual - best.residual) <= tol;
    if (better_fit || (same_fit && c.norm < best.norm)) best = c;
  }
  return best;
}

}  // namespace

ThrusterLayout ThrusterLayout::x_configuration(double r3) {
  ThrusterLayout layout;
  constexpr std::array<double, 4> pointing = {45.0, 135.0, 225.0, 315.0};
  constexpr std::array<double, 4> side = {1.0, -1.0, 1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    layout.angles[i] = pointing[i] * kDeg;
    layout.positions[i] = r3 * direction((pointing[i] + side[i] * 90.0) * kDeg);
  }
  return layout;
}

void validate_layout(const ThrusterLayout& layout) {
  Vec2 sum = Vec2::Zero();
  for (double a : layout.angles) sum += direction(a);
  if (sum.norm() > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "layout.angles: pointing directions must sum to zero");
  }
  const double r0 = layout.positions[0].norm();
  for (const Vec2& pos : layout.positions) {
    if (!pos.allFinite() || std::abs(pos.norm() - r0) > 1e-9 * std::max(1.0, r0)) {
      throw Error(ErrorCode::InvalidConfig, "layout.positions: thrusters must share one radius");
    }
  }
  for (double d : layout.vertical_directions) {
    if (d != 1.0 && d != -1.0) {
      throw Error(ErrorCode::InvalidConfig, "layout.vertical_directions: entries must be +1 or -1");
    }
  }
}

Allocation allocate(const Wrench& w, const ThrusterLayout& layout, const BlimpParams& p) {
  Allocation out;

  const Eigen::Vector3d b(w.f_xy.x(), w.f_xy.y(), w.tau_z);
  const Candidate sol = solve_horizontal(horizontal_map(layout), b);
  const double fit_tol = 1e-12 * (1.0 + b.norm());
  if (sol.residual > fit_tol) out.saturated = true;

  Eigen::Vector4d thrust = sol.thrust;
  const double peak = thrust.maxCoeff();
  if (peak > p.t_max) {
    // the problem is positively homogeneous, so scaling the demand scales
    // the optimal thrusts by the same factor
    out.scale = p.t_max / peak;
    thrust *= out.scale;
    out.saturated = true;
  }
  for (int i = 0; i < 4; ++i) out.command.h[i] = std::min(thrust[i], p.t_max);

  if (w.f_z != 0.0) {
    const double sign = w.f_z > 0.0 ? 1.0 : -1.0;
    int count = 0;
    for (double d : layout.vertical_directions) count += (d == sign);
    if (count == 0) {
      out.saturated = true;
    } else {
      double each = std::abs(w.f_z) / count;
      if (each > p.t_max) {
        each = p.t_max;
        out.saturated = true;
      }
      for (int j = 0; j < 2; ++j) {
        if (layout.vertical_directions[j] == sign) out.command.v[j] = each;
      }
    }
  }
  return out;
}

Wrench wrench_of(const MotorCommand& cmd, const ThrusterLayout& layout) {
  Wrench w;
  for (int i = 0; i < 4; ++i) {
    const Vec2 d = direction(layout.angles[i]);
    w.f_xy += cmd.h[i] * d;
    w.tau_z += cross(layout.positions[i], d) * cmd.h[i];
  }
  for (int j = 0; j < 2; ++j) w.f_z += layout.vertical_directions[j] * cmd.v[j];
  return w;
}

}  // namespace blimpassist

#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// the tests check.

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "blimpassist/model.hpp"

namespace blimpassist::testing {

/// Kinetic energy plus the pendulum potential of both tilt axes.
inline double mechanical_energy(const BlimpState& s, const BlimpParams& p) {
  return 0.5 * p.m * s.v_xy.squaredNorm() + 0.5 * p.m * s.v_z * s.v_z +
         0.5 * p.Iy * s.tilt_rate.squaredNorm() + 0.5 * p.Iz * s.omega_z * s.omega_z +
         p.m * p.g * p.r1 * ((1.0 - std::cos(s.tilt.x())) + (1.0 - std::cos(s.tilt.y())));
}

/// Golden-section search for a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iterations; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/// Minimum-norm non-negative solution of A t = b for a 3x4 map of rank 3,
/// found by walking the one-dimensional solution line t = t0 + s n.
/// Returns NaNs when no non-negative point exists on the line.
inline Eigen::Vector4d line_search_allocation(const Eigen::Matrix<double, 3, 4>& a,
                                              const Eigen::Vector3d& b) {
  const Eigen::Vector4d t0 = a.transpose() * (a * a.transpose()).inverse() * b;
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(a);
  const Eigen::Vector4d n = lu.kernel().col(0).normalized();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    // t0_i + s n_i >= 0
    if (std::abs(n[i]) < 1e-15) {
      if (t0[i] < -1e-12) return Eigen::Vector4d::Constant(std::nan(""));
    } else if (n[i] > 0) {
      lo = std::max(lo, -t0[i] / n[i]);
    } else {
      hi = std::min(hi, -t0[i] / n[i]);
    }
  }
  if (lo > hi + 1e-12) return Eigen::Vector4d::Constant(std::nan(""));
  const double lo_c = std::isfinite(lo) ? lo : -1e3;
  const double hi_c = std::isfinite(hi) ? hi : 1e3;
  const double s = golden_min([&](double x) { return (t0 + x * n).squaredNorm(); }, lo_c, hi_c);
  return (t0 + s * n).cwiseMax(0.0);
}

}  // namespace blimpassist::testing

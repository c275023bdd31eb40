#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "blimpassist/dynamics.hpp"
#include "blimpassist/error.hpp"
#include "oracles.hpp"

namespace blimpassist {
namespace {

const BlimpParams kDefaults;

TEST(BalancedPitch, ZeroThrustZeroTilt) {
  EXPECT_EQ(balanced_pitch_for_thrust(0.0, kDefaults), 0.0);
}

TEST(BalancedPitch, SmallThrust) {
  const double theta = balanced_pitch_for_thrust(0.10, kDefaults);
  // asin(0.1 * 0.05 / (0.15 * 0.30 * 9.81)), 30-digit reference
  EXPECT_NEAR(theta, 0.0113265532010563754, 1e-15);
  // substituted back into the balance relation
  EXPECT_NEAR(3.0 * 0.30 * 9.81 * std::sin(theta), 0.10, 1e-12);
}

TEST(BalancedPitch, RangeBoundary) {
  const double f_max = (kDefaults.r1 / kDefaults.r2) * kDefaults.m * kDefaults.g;
  EXPECT_NEAR(f_max, 8.829, 1e-12);
  EXPECT_NEAR(balanced_pitch_for_thrust(f_max * (1 - 1e-12), kDefaults), std::numbers::pi / 2, 2e-6);
  try {
    balanced_pitch_for_thrust(f_max * 1.000001, kDefaults);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThrustExceedsBalanceRange);
  }
  EXPECT_THROW(balanced_pitch_for_thrust(-f_max * 1.01, kDefaults), Error);
}

TEST(ThrustForPitch, Values) {
  EXPECT_EQ(thrust_for_balanced_pitch(0.0, kDefaults), 0.0);
  EXPECT_NEAR(thrust_for_balanced_pitch(0.1, kDefaults), 0.881429235574845757, 1e-14);
  EXPECT_NEAR(thrust_for_balanced_pitch(balanced_pitch_for_thrust(0.3, kDefaults), kDefaults), 0.3,
              1e-12);
}

TEST(ThrustForPitch, RejectsOutOfRange) {
  try {
    thrust_for_balanced_pitch(std::numbers::pi / 2, kDefaults);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TiltOutOfRange);
  }
}

TEST(ThrustForPitch, RoundTripProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const double theta = u(rng);
    EXPECT_NEAR(balanced_pitch_for_thrust(thrust_for_balanced_pitch(theta, kDefaults), kDefaults),
                theta, 1e-12 / std::cos(theta));
  }
}

TEST(Bernoulli, Values) {
  EXPECT_EQ(bernoulli_force(Vec2::Zero(), kDefaults), 0.0);
  EXPECT_DOUBLE_EQ(bernoulli_force(Vec2(1.0, 0.0), kDefaults), 0.02);
  EXPECT_NEAR(bernoulli_force(Vec2(0.6, 0.8), kDefaults), 0.02, 1e-15);
}

TEST(Bernoulli, RotationInvariantAndQuadratic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 v(u(rng), u(rng));
    const double a = u(rng);
    const Vec2 rotated(std::cos(a) * v.x() - std::sin(a) * v.y(),
                       std::sin(a) * v.x() + std::cos(a) * v.y());
    const double f = bernoulli_force(v, kDefaults);
    EXPECT_NEAR(bernoulli_force(rotated, kDefaults), f, 1e-12);
    EXPECT_NEAR(bernoulli_force(2.5 * v, kDefaults), 6.25 * f, 1e-12);
    EXPECT_GE(f, 0.0);
  }
}

TEST(Derivative, RestIsEquilibrium) {
  const StateDerivative d = derivative(BlimpState{}, Wrench{}, kDefaults);
  EXPECT_EQ(d.p_xy, Vec2::Zero());
  EXPECT_EQ(d.v_xy, Vec2::Zero());
  EXPECT_EQ(d.tilt_rate, Vec2::Zero());
  EXPECT_EQ(d.v_z, 0.0);
  EXPECT_EQ(d.omega_z, 0.0);
}

TEST(Derivative, BalancedTiltHasNoTiltAcceleration) {
  BlimpState s;
  s.tilt.x() = 0.0113265532010563754;
  Wrench w;
  w.f_xy.x() = 0.10;
  EXPECT_NEAR(derivative(s, w, kDefaults).tilt_rate.x(), 0.0, 1e-9);
}

TEST(Derivative, YawDecayRate) {
  BlimpState s;
  s.omega_z = 1.0;
  EXPECT_NEAR(derivative(s, Wrench{}, kDefaults).omega_z, -0.13, 1e-15);
}

TEST(Derivative, ModelRegionViolation) {
  BlimpState s;
  s.tilt.y() = std::numbers::pi / 2;
  try {
    derivative(s, Wrench{}, kDefaults);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelRegionViolation);
  }
}

TEST(Derivative, EquilibriumClosure) {
  for (double theta = -0.5; theta <= 0.5; theta += 0.05) {
    BlimpState s;
    const double f = thrust_for_balanced_pitch(theta, kDefaults);
    s.tilt = Vec2(theta, 0.0);
    s.v_xy = Vec2(f * std::cos(theta) / kDefaults.Dh, 0.0);
    Wrench w;
    w.f_xy = Vec2(f, 0.0);
    const StateDerivative d = derivative(s, w, kDefaults);
    EXPECT_NEAR(d.tilt_rate.x(), 0.0, 1e-12) << theta;
    EXPECT_NEAR(d.v_xy.x(), 0.0, 1e-12) << theta;
  }
}

BlimpState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BlimpState s;
  s.p_xy = Vec2(u(rng), u(rng)) * 5;
  s.z = u(rng);
  s.v_xy = Vec2(u(rng), u(rng)) * 2;
  s.v_z = u(rng);
  s.tilt = Vec2(u(rng), u(rng)) * 1.2;
  s.tilt_rate = Vec2(u(rng), u(rng)) * 3;
  s.psi = u(rng) * 3;
  s.omega_z = u(rng) * 2;
  return s;
}

TEST(Derivative, YawDecoupledFromTranslation) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    BlimpState a = random_state(rng);
    BlimpState b = random_state(rng);
    b.omega_z = a.omega_z;
    Wrench wa, wb;
    wa.f_xy = Vec2(0.3, -0.2);
    wb.f_xy = Vec2(-0.7, 0.1);
    wb.f_z = 0.4;
    wa.tau_z = wb.tau_z = 0.003;
    EXPECT_EQ(derivative(a, wa, kDefaults).omega_z, derivative(b, wb, kDefaults).omega_z);
  }
}

TEST(Derivative, AxisSwapSymmetry) {
  std::mt19937_64 rng(19);
  auto swap = [](Vec2 v) { return Vec2(v.y(), v.x()); };
  for (int i = 0; i < 200; ++i) {
    const BlimpState s = random_state(rng);
    Wrench w;
    w.f_xy = Vec2(0.4, -0.9) * (i % 3);
    w.f_z = 0.1;
    BlimpState s2 = s;
    s2.p_xy = swap(s.p_xy);
    s2.v_xy = swap(s.v_xy);
    s2.tilt = swap(s.tilt);
    s2.tilt_rate = swap(s.tilt_rate);
    Wrench w2 = w;
    w2.f_xy = swap(w.f_xy);
    const StateDerivative d = derivative(s, w, kDefaults);
    const StateDerivative d2 = derivative(s2, w2, kDefaults);
    EXPECT_EQ(d2.v_xy, swap(d.v_xy));
    EXPECT_EQ(d2.tilt_rate, swap(d.tilt_rate));
    EXPECT_EQ(d2.p_xy, swap(d.p_xy));
    EXPECT_EQ(d2.tilt, swap(d.tilt));
    // the vertical sum is order dependent only up to rounding
    EXPECT_NEAR(d2.v_z, d.v_z, 1e-15);
  }
}

TEST(StepRk4, ZeroStateStaysPut) {
  const BlimpState out = step_rk4(BlimpState{}, Wrench{}, kDefaults, 0.01);
  BlimpState expected;
  expected.t = 0.01;
  EXPECT_EQ(out, expected);
}

TEST(StepRk4, RejectsBadStep) {
  EXPECT_THROW(step_rk4(BlimpState{}, Wrench{}, kDefaults, 0.0), Error);
  EXPECT_THROW(step_rk4(BlimpState{}, Wrench{}, kDefaults, 0.021), Error);
}

double yaw_decay_error(double dt, double horizon) {
  BlimpState s;
  s.omega_z = 1.0;
  const int n = static_cast<int>(std::lround(horizon / dt));
  for (int i = 0; i < n; ++i) s = step_rk4(s, Wrench{}, kDefaults, dt);
  return std::abs(s.omega_z - closed_form_yaw(1.0, 0.0, kDefaults, horizon));
}

TEST(StepRk4, YawDecayMatchesClosedForm) {
  EXPECT_LT(yaw_decay_error(0.01, 10.0), 1e-8);
}

TEST(StepRk4, FourthOrderWhereTruncationDominates) {
  // A stiffer yaw channel puts the truncation error well above roundoff.
  BlimpParams p = kDefaults;
  p.Iz = 1e-4;  // decay rate 13 1/s
  auto err = [&](double dt) {
    BlimpState s;
    s.omega_z = 1.0;
    const int n = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) s = step_rk4(s, Wrench{}, p, dt);
    return std::abs(s.omega_z - closed_form_yaw(1.0, 0.0, p, 0.5));
  };
  const double ratio = err(0.01) / err(0.005);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(StepRk4, PropagatesModelRegionViolation) {
  BlimpState s;
  s.tilt.x() = 1.5;
  s.tilt_rate.x() = 30.0;
  EXPECT_THROW(step_rk4(s, Wrench{}, kDefaults, 0.02), Error);
}

TEST(StepRk4, PassivityWithZeroWrench) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    BlimpState s = random_state(rng);
    double e = testing::mechanical_energy(s, kDefaults);
    for (int i = 0; i < 2000; ++i) {
      s = step_rk4(s, Wrench{}, kDefaults, 1e-3);
      const double next = testing::mechanical_energy(s, kDefaults);
      ASSERT_LE(next, e + 1e-10) << "trial " << trial << " step " << i;
      e = next;
    }
  }
}

TEST(StepRk4, Deterministic) {
  std::mt19937_64 rng(29);
  const BlimpState s = random_state(rng);
  Wrench w;
  w.f_xy = Vec2(0.2, 0.5);
  w.tau_z = -0.002;
  EXPECT_EQ(step_rk4(s, w, kDefaults, 0.01), step_rk4(s, w, kDefaults, 0.01));
}

TEST(ClosedFormYaw, Values) {
  EXPECT_EQ(closed_form_yaw(1.0, 0.0, kDefaults, 0.0), 1.0);
  EXPECT_NEAR(closed_form_yaw(1.0, 0.0, kDefaults, 10.0), 0.272531793034012603, 1e-15);
  EXPECT_NEAR(closed_form_yaw(0.0, 1.3e-3, kDefaults, 1e4), 1.0, 1e-12);
}

TEST(RotationalEnergy, Values) {
  EXPECT_EQ(rotational_energy(0.0, kDefaults), 0.0);
  EXPECT_DOUBLE_EQ(rotational_energy(2.0, kDefaults), 0.02);
  EXPECT_DOUBLE_EQ(rotational_energy(-2.0, kDefaults), 0.02);
}

}  // namespace
}  // namespace blimpassist

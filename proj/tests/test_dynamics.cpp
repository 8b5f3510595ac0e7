#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "downwash/dynamics.hpp"

using namespace downwash;
using namespace downwash::dynamics;

TEST(LinearSystem, Structure) {
  const LinearSystem sys = linear_system();
  StateMatrix a = StateMatrix::Zero();
  a.block<3, 3>(0, 3).setIdentity();
  EXPECT_TRUE(sys.a.isApprox(a));
  InputMatrix b = InputMatrix::Zero();
  b.block<3, 3>(3, 0).setIdentity();
  b(6, 3) = 1.0;
  EXPECT_TRUE(sys.b.isApprox(b));
  EXPECT_TRUE(sys.c.isApprox(StateMatrix::Identity()));
}

TEST(Step, ExactForConstantInput) {
  // Piecewise-constant input on a double integrator: RK4 is exact.
  VehicleState x{Vec3(1.0, -2.0, -3.0), Vec3(0.5, 0.0, -0.25), 0.1};
  const ControlInput u{Vec3(0.3, -0.2, 0.1), 0.4};
  const Vec3 f(0.05, 0.0, 0.2);
  const double dt = 0.02;
  VehicleState y = x;
  for (int k = 0; k < 50; ++k) y = step(y, u, f, dt);
  const double t = 50 * dt;
  const Vec3 acc = u.a + f;
  EXPECT_LT((y.p - (x.p + x.v * t + 0.5 * acc * t * t)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((y.v - (x.v + acc * t)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(y.psi, 0.1 + 0.4 * t, 1e-12);
}

TEST(Step, WrapsYaw) {
  VehicleState x{Vec3::Zero(), Vec3::Zero(), std::numbers::pi - 0.01};
  const VehicleState y = step(x, {Vec3::Zero(), 1.0}, Vec3::Zero(), 0.02);
  EXPECT_NEAR(y.psi, -std::numbers::pi + 0.01, 1e-12);
}

TEST(Step, RejectsBadInputs) {
  const VehicleState x;
  EXPECT_THROW(step(x, {}, Vec3::Zero(), 0.0), std::invalid_argument);
  EXPECT_THROW(step(x, {}, Vec3::Zero(), -0.1), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step(x, {Vec3(nan, 0, 0), 0.0}, Vec3::Zero(), 0.02), NumericalError);
  VehicleState bad;
  bad.v.x() = std::numeric_limits<double>::infinity();
  EXPECT_THROW(step(bad, {}, Vec3::Zero(), 0.02), NumericalError);
}

TEST(Clamp, ScalesNormOnly) {
  ControlInput u{Vec3(6.0, 8.0, 0.0), 0.7};
  const ControlInput c = clamp_input(u, 5.0);
  EXPECT_NEAR(c.a.norm(), 5.0, 1e-12);
  EXPECT_NEAR(c.a.x() / c.a.y(), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(c.psi_rate, 0.7);
  const ControlInput small = clamp_input({Vec3(1.0, 0.0, 0.0), 0.0}, 5.0);
  EXPECT_EQ(small.a, Vec3(1.0, 0.0, 0.0));
}

TEST(InversionMap, HoverIsLevelWithWeightThrust) {
  const VehicleParams p;
  const AttitudeTarget t = inversion_map(Vec3::Zero(), 0.3, p);
  EXPECT_NEAR(t.roll, 0.0, 1e-12);
  EXPECT_NEAR(t.pitch, 0.0, 1e-12);
  EXPECT_NEAR(t.thrust, p.mass * p.g, 1e-12);
}

TEST(InversionMap, RoundTripsAcceleration) {
  const VehicleParams p;
  for (double psi : {-2.5, 0.0, 1.1}) {
    for (const Vec3& a : {Vec3(2.0, -1.0, 0.5), Vec3(-3.0, 2.0, -2.0), Vec3(0.0, 4.0, 1.0)}) {
      const AttitudeTarget t = inversion_map(a, psi, p);
      EXPECT_LT((acceleration_from_attitude(t, psi, p) - a).norm(), 1e-10);
    }
  }
}

TEST(InversionMap, RejectsFreeFallAndInversion) {
  const VehicleParams p;
  EXPECT_THROW(inversion_map(Vec3(0.0, 0.0, p.g), 0.0, p), NumericalError);
  EXPECT_THROW(inversion_map(Vec3(0.0, 0.0, 3.0 * p.g), 0.0, p), NumericalError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "downwash/geometry.hpp"
#include "test_support.hpp"

using namespace downwash;
using namespace downwash::geometry;
using downwash::testing::random_angle;
using downwash::testing::random_rotation;
using downwash::testing::random_state;

TEST(Wrap, TwoPiRange) {
  EXPECT_DOUBLE_EQ(wrap_two_pi(0.0), 0.0);
  EXPECT_NEAR(wrap_two_pi(-0.5), kTwoPi - 0.5, 1e-15);
  EXPECT_NEAR(wrap_two_pi(7.0), 7.0 - kTwoPi, 1e-15);
  EXPECT_LT(wrap_two_pi(-1e-18), kTwoPi);
  EXPECT_GE(wrap_two_pi(-1e-18), 0.0);
}

TEST(Wrap, PiRangeIsHalfOpen) {
  EXPECT_NEAR(wrap_pi(std::numbers::pi), std::numbers::pi, 1e-15);
  EXPECT_NEAR(wrap_pi(-std::numbers::pi), std::numbers::pi, 1e-15);
  EXPECT_NEAR(wrap_pi(3.0 * std::numbers::pi / 2.0), -std::numbers::pi / 2.0, 1e-15);
}

TEST(PlanarRotation, CanonicalisesAngle) {
  EXPECT_NEAR(PlanarRotation(-std::numbers::pi / 2).omega(), 3 * std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(PlanarRotation(kTwoPi + 0.25).omega(), 0.25, 1e-14);
}

TEST(Rotation, ZAxisMatchesAngleAxis) {
  for (double a : {-2.0, 0.0, 0.3, 3.0}) {
    EXPECT_TRUE(rotation_z(a).isApprox(rotation_about_axis(Vec3::UnitZ(), a), 1e-14));
    EXPECT_TRUE(is_rotation(rotation_z(a)));
  }
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_FALSE(is_rotation(reflect));
}

TEST(Projection, SplitsIntoPlanarAndVertical) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = random_rotation(rng);
    const Vec3 w = downwash::testing::random_vec(rng, 3.0);
    const Vec3 a3 = r.row(2).transpose();
    const Vec3 pl = project_planar(w, r);
    const Vec3 vt = project_vertical(w, r);
    EXPECT_NEAR((pl + vt - w).norm(), 0.0, 1e-12);
    EXPECT_NEAR(pl.dot(a3), 0.0, 1e-12);
    EXPECT_NEAR(vt.cross(a3).norm(), 0.0, 1e-12);
    EXPECT_NEAR((project_planar(pl, r) - pl).norm(), 0.0, 1e-12);
  }
}

TEST(FeatureMap, HandComputedLevelLeader) {
  // Leader level: leader frame equals inertial frame.
  InteractionState x{Vec3(3.0, 4.0, -1.0), Vec3(0.0, 2.0, 0.0), Vec3(1.0, 0.0, 0.5)};
  const FeatureVector h = feature_map(x, Mat3::Identity(), FeatureMode::full);
  EXPECT_DOUBLE_EQ(h.planar_dp_norm, 5.0);
  EXPECT_DOUBLE_EQ(h.planar_vb_norm, 1.0);
  EXPECT_DOUBLE_EQ(h.cos_angle, 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(h.dp_down, -1.0);
  EXPECT_DOUBLE_EQ(h.vb_down, 0.5);
  EXPECT_DOUBLE_EQ(h.planar_va_norm, 2.0);
  EXPECT_EQ(h.size(), 6);
  EXPECT_EQ(feature_map(x, Mat3::Identity(), FeatureMode::near_hover).as_vector().size(), 5);
}

TEST(FeatureMap, DegeneratePlanarVectorsGiveZeroCosine) {
  InteractionState x{Vec3(0.0, 0.0, -1.0), Vec3::Zero(), Vec3(1.0, 0.0, 0.0)};
  EXPECT_EQ(feature_map(x, Mat3::Identity(), FeatureMode::full).cos_angle, 0.0);
  EXPECT_EQ(polar_angle(x, Mat3::Identity()), 0.0);
  x = {Vec3(1.0, 0.0, 0.0), Vec3::Zero(), Vec3(0.0, 0.0, 2.0)};
  EXPECT_EQ(feature_map(x, Mat3::Identity(), FeatureMode::full).cos_angle, 0.0);
}

TEST(FeatureMap, TiltedLeaderUsesBodyAxes) {
  // Leader rolled 90 degrees about north: body down is inertial east (or west).
  const Mat3 r_ma = rotation_about_axis(Vec3::UnitX(), std::numbers::pi / 2).transpose();
  const Vec3 a3 = r_ma.row(2).transpose();
  InteractionState x{a3 * 0.7 + Vec3(0.3, 0.0, 0.0), Vec3::Zero(), Vec3::Zero()};
  const FeatureVector h = feature_map(x, r_ma, FeatureMode::near_hover);
  EXPECT_NEAR(h.dp_down, 0.7, 1e-12);
  EXPECT_NEAR(h.planar_dp_norm, 0.3, 1e-12);
}

TEST(PolarAngle, QuarterTurn) {
  InteractionState x{Vec3(0.0, 2.0, -1.0), Vec3::Zero(), Vec3::Zero()};
  EXPECT_NEAR(polar_angle(x, Mat3::Identity()), std::numbers::pi / 2, 1e-15);
  x.delta_p = Vec3(0.0, -2.0, 0.0);
  EXPECT_NEAR(polar_angle(x, Mat3::Identity()), 3 * std::numbers::pi / 2, 1e-15);
}

TEST(GroupAction, ElementFixesBodyDownAxis) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = random_rotation(rng);
    const Mat3 h = rotation_about_body_down(PlanarRotation(random_angle(rng)), r);
    EXPECT_TRUE(is_rotation(h, 1e-12));
    const Vec3 a3 = r.row(2).transpose();
    EXPECT_NEAR((h * a3 - a3).norm(), 0.0, 1e-12);
  }
}

TEST(GroupAction, Composes) {
  std::mt19937_64 rng(3);
  const Mat3 r = random_rotation(rng);
  const double a = 0.7, b = 2.9;
  const Mat3 lhs = rotation_about_body_down(PlanarRotation(a), r) * rotation_about_body_down(PlanarRotation(b), r);
  EXPECT_TRUE(lhs.isApprox(rotation_about_body_down(PlanarRotation(a + b), r), 1e-12));
}

class InvarianceProperty : public ::testing::TestWithParam<FeatureMode> {};

TEST_P(InvarianceProperty, FeaturesInvariantAndAngleShifts) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 r = random_rotation(rng);
    const InteractionState x = random_state(rng);
    const PlanarRotation w(random_angle(rng));
    const InteractionState gx = act_input(w, x, r);
    const Eigen::VectorXd h0 = feature_map(x, r, GetParam()).as_vector();
    const Eigen::VectorXd h1 = feature_map(gx, r, GetParam()).as_vector();
    EXPECT_LT((h0 - h1).cwiseAbs().maxCoeff(), 1e-9);
    const double shift = wrap_pi(polar_angle(gx, r) - polar_angle(x, r) - w.omega());
    EXPECT_LT(std::abs(shift), 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, InvarianceProperty, ::testing::Values(FeatureMode::full, FeatureMode::near_hover));

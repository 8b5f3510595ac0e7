#pragma once

// Frames, projections and the SO(2) symmetry about the leader's body-down axis.
//
// All vectors are expressed in the inertial NED frame. `r_ma` is the rotation
// taking inertial coordinates to the leader's body frame, so the leader's
// down axis a3 is the third row of r_ma.

#include <Eigen/Dense>

namespace downwash {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace geometry {

inline constexpr double kNormEpsilon = 1e-9;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Relative kinematics of the leader/follower pair, the model input.
/// delta_p is leader position minus follower position.
struct InteractionState {
  Vec3 delta_p = Vec3::Zero();
  Vec3 v_leader = Vec3::Zero();
  Vec3 v_follower = Vec3::Zero();
};

enum class FeatureMode { full, near_hover };

/// Invariant features. Order matches the network input layout.
struct FeatureVector {
  double cos_angle = 0.0;
  double planar_dp_norm = 0.0;
  double planar_vb_norm = 0.0;
  double dp_down = 0.0;
  double vb_down = 0.0;
  double planar_va_norm = 0.0;  // dropped in near_hover mode
  FeatureMode mode = FeatureMode::full;

  int size() const { return mode == FeatureMode::full ? 6 : 5; }
  Eigen::VectorXd as_vector() const;
};

int feature_count(FeatureMode mode);

/// Angle of rotation about the leader's a3 axis, canonicalised to [0, 2pi).
class PlanarRotation {
 public:
  PlanarRotation() = default;
  explicit PlanarRotation(double omega);
  double omega() const { return omega_; }

 private:
  double omega_ = 0.0;
};

/// Wrap an angle to [0, 2pi).
double wrap_two_pi(double angle);
/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

bool is_rotation(const Mat3& m, double tol = 1e-9);
Mat3 rotation_about_axis(const Vec3& axis, double angle);
Mat3 rotation_z(double angle);

Vec3 project_planar(const Vec3& w, const Mat3& r_ma);
Vec3 project_vertical(const Vec3& w, const Mat3& r_ma);

FeatureVector feature_map(const InteractionState& x, const Mat3& r_ma, FeatureMode mode);

/// Polar angle of the planar part of delta_p, measured from a1 in the leader
/// frame. Zero when that planar part is degenerate.
double polar_angle(const InteractionState& x, const Mat3& r_ma);

/// Element of H_A: r_ma^T * Rz(omega) * r_ma.
Mat3 rotation_about_body_down(PlanarRotation omega, const Mat3& r_ma);

InteractionState act_input(PlanarRotation omega, const InteractionState& x, const Mat3& r_ma);
Vec3 act_output(PlanarRotation omega, const Vec3& f, const Mat3& r_ma);

}  // namespace geometry
}  // namespace downwash

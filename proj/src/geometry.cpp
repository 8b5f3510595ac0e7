#include "downwash/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace downwash::geometry {

namespace {

const Eigen::DiagonalMatrix<double, 3> kPlanarSelector(1.0, 1.0, 0.0);

}  // namespace

Eigen::VectorXd FeatureVector::as_vector() const {
  Eigen::VectorXd out(size());
  out(0) = cos_angle;
  out(1) = planar_dp_norm;
  out(2) = planar_vb_norm;
  out(3) = dp_down;
  out(4) = vb_down;
  if (mode == FeatureMode::full) out(5) = planar_va_norm;
  return out;
}

int feature_count(FeatureMode mode) { return mode == FeatureMode::full ? 6 : 5; }

PlanarRotation::PlanarRotation(double omega) : omega_(wrap_two_pi(omega)) {}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double angle) {
  double r = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - std::numbers::pi;
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho < tol && std::abs(m.determinant() - 1.0) < tol;
}

Mat3 rotation_about_axis(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 rotation_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 out;
  out << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
  return out;
}

Vec3 project_planar(const Vec3& w, const Mat3& r_ma) {
  return r_ma.transpose() * (kPlanarSelector * (r_ma * w));
}

Vec3 project_vertical(const Vec3& w, const Mat3& r_ma) { return w - project_planar(w, r_ma); }

FeatureVector feature_map(const InteractionState& x, const Mat3& r_ma, FeatureMode mode) {
  // Work in leader coordinates: the planar part is the first two components.
  const Vec3 dp_leader = r_ma * x.delta_p;
  const Vec3 vb_leader = r_ma * x.v_follower;
  const Vec3 va_leader = r_ma * x.v_leader;
  const Eigen::Vector2d dp_plane = dp_leader.head<2>();
  const Eigen::Vector2d vb_plane = vb_leader.head<2>();

  FeatureVector h;
  h.mode = mode;
  h.planar_dp_norm = dp_plane.norm();
  h.planar_vb_norm = vb_plane.norm();
  if (h.planar_dp_norm >= kNormEpsilon && h.planar_vb_norm >= kNormEpsilon) {
    const double c = dp_plane.dot(vb_plane) / (h.planar_dp_norm * h.planar_vb_norm);
    h.cos_angle = std::clamp(c, -1.0, 1.0);
  }
  h.dp_down = dp_leader.z();
  h.vb_down = vb_leader.z();
  if (mode == FeatureMode::full) h.planar_va_norm = va_leader.head<2>().norm();
  return h;
}

double polar_angle(const InteractionState& x, const Mat3& r_ma) {
  const Vec3 dp_leader = r_ma * project_planar(x.delta_p, r_ma);
  if (dp_leader.head<2>().norm() < kNormEpsilon) return 0.0;
  return wrap_two_pi(std::atan2(dp_leader.y(), dp_leader.x()));
}

Mat3 rotation_about_body_down(PlanarRotation omega, const Mat3& r_ma) {
  return r_ma.transpose() * rotation_z(omega.omega()) * r_ma;
}

InteractionState act_input(PlanarRotation omega, const InteractionState& x, const Mat3& r_ma) {
  const Mat3 h = rotation_about_body_down(omega, r_ma);
  return {h * x.delta_p, x.v_leader, h * x.v_follower};
}

Vec3 act_output(PlanarRotation omega, const Vec3& f, const Mat3& r_ma) {
  return rotation_about_body_down(omega, r_ma) * f;
}

}  // namespace downwash::geometry

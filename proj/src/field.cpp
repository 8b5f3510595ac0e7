#include "downwash/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace downwash::field {

void FieldParams::validate() const {
  if (!(sigma_r > 0.0)) throw std::invalid_argument("FieldParams: sigma_r must be positive");
  if (!(z_near > 0.0) || !(z_near < z_far)) throw std::invalid_argument("FieldParams: need 0 < z_near < z_far");
  if (a_down < 0.0 || a_lift < 0.0 || a_rad < 0.0 || eps_sym < 0.0 || leader_speed_gain < 0.0) {
    throw std::invalid_argument("FieldParams: amplitudes must be non-negative");
  }
}

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct LeaderFrameTerms {
  Eigen::Vector2d radial_dir = Eigen::Vector2d::Zero();
  double r = 0.0;
  double envelope = 0.0;  // exp(-r^2 / 2 sigma^2) * w(z) * leader speed factor
};

LeaderFrameTerms leader_frame_terms(const geometry::InteractionState& x, const Mat3& r_ma, const FieldParams& p) {
  const Vec3 dp = r_ma * x.delta_p;
  LeaderFrameTerms t;
  t.r = dp.head<2>().norm();
  if (t.r >= geometry::kNormEpsilon) t.radial_dir = dp.head<2>() / t.r;
  const double speed_factor = 1.0 + p.leader_speed_gain * (r_ma * x.v_leader).head<2>().norm();
  t.envelope = std::exp(-t.r * t.r / (2.0 * p.sigma_r * p.sigma_r)) * vertical_envelope(-dp.z(), p) * speed_factor;
  return t;
}

}  // namespace

double vertical_envelope(double separation, const FieldParams& p) {
  if (separation <= 0.0 || separation >= p.z_far) return 0.0;
  if (separation < p.z_near) return smoothstep(separation / p.z_near);
  return 1.0 - smoothstep((separation - p.z_near) / (p.z_far - p.z_near));
}

Vec3 true_force(const geometry::InteractionState& x, const Mat3& r_ma, const FieldParams& p) {
  const LeaderFrameTerms t = leader_frame_terms(x, r_ma, p);
  if (t.envelope == 0.0) return Vec3::Zero();
  const geometry::FeatureVector h = geometry::feature_map(x, r_ma, geometry::FeatureMode::near_hover);
  const double c = h.cos_angle;
  const double s = h.planar_vb_norm;
  const double gamma = t.envelope * (p.a_down - p.a_lift * c * s);
  const double alpha = p.a_rad * (t.r / p.sigma_r) * t.envelope * (1.0 - 2.0 * c * s / (1.0 + s));
  const Vec3 leader_frame(alpha * t.radial_dir.x(), alpha * t.radial_dir.y(), gamma);
  return r_ma.transpose() * leader_frame;
}

Vec3 perturbed_force(const geometry::InteractionState& x, const Mat3& r_ma, const FieldParams& p) {
  const Vec3 base = true_force(x, r_ma, p);
  if (p.eps_sym == 0.0) return base;
  const LeaderFrameTerms t = leader_frame_terms(x, r_ma, p);
  const double inertial_planar = x.delta_p.head<2>().norm();
  const double phi_g =
      inertial_planar < geometry::kNormEpsilon ? 0.0 : std::atan2(x.delta_p.y(), x.delta_p.x());
  const double amp = p.eps_sym * p.a_down * t.envelope;
  return base + amp * Vec3(std::cos(phi_g), std::sin(2.0 * phi_g), 0.0);
}

Vec3 noisy_accel(const Vec3& a_true, double sigma_noise, std::mt19937_64& rng) {
  if (sigma_noise < 0.0) throw std::invalid_argument("noisy_accel: sigma_noise must be non-negative");
  if (sigma_noise == 0.0) return a_true;
  std::normal_distribution<double> noise(0.0, sigma_noise);
  Vec3 out = a_true;
  for (int i = 0; i < 3; ++i) out(i) += noise(rng);
  return out;
}

Vec3 noisy_accel(const Vec3& a_true, double sigma_noise, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return noisy_accel(a_true, sigma_noise, rng);
}

}  // namespace downwash::field

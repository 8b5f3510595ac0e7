#pragma once

// Synthetic ground-truth downwash field standing in for real flight data.
//
// The field is built in the leader frame as [alpha * c_r ; gamma] where c_r
// is the unit planar direction of delta_p and alpha, gamma depend only on
// invariant quantities, so it is H_A-equivariant by construction. The
// constants are not physical; they size the disturbance at a few m/s^2.

#include <cstdint>
#include <random>

#include "downwash/geometry.hpp"

namespace downwash::field {

struct FieldParams {
  double a_down = 2.0;   // peak static down-force [m/s^2]
  double a_lift = 1.5;   // velocity-coupled vertical term [m/s^2]
  double a_rad = 0.8;    // radial term [m/s^2]
  double sigma_r = 0.35; // lateral length scale [m]
  double z_near = 0.3;   // [m]
  double z_far = 2.0;    // [m]
  double eps_sym = 0.0;  // non-equivariant perturbation amplitude
  // Scales the whole field by (1 + gain * |planar v_leader|). Zero keeps the
  // field independent of the leader's velocity (near-hover).
  double leader_speed_gain = 0.0;

  void validate() const;
};

/// Vertical envelope as a function of vertical separation d = -[R dp]_3
/// (positive when the leader is above). Rises smoothly from 0 at d = 0 to 1
/// at z_near, then decays smoothly to 0 at z_far.
double vertical_envelope(double separation, const FieldParams& params);

Vec3 true_force(const geometry::InteractionState& x, const Mat3& r_ma, const FieldParams& params);

/// true_force plus a term that breaks the symmetry when eps_sym > 0.
Vec3 perturbed_force(const geometry::InteractionState& x, const Mat3& r_ma, const FieldParams& params);

Vec3 noisy_accel(const Vec3& a_true, double sigma_noise, std::mt19937_64& rng);
Vec3 noisy_accel(const Vec3& a_true, double sigma_noise, std::uint64_t rng_seed);

}  // namespace downwash::field

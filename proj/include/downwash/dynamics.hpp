#pragma once

// Feedback-linearized multirotor plant: x = [p, v, psi], u = [a, psi_rate],
// xdot = A x + B (u + [f_ext; 0]).

#include <stdexcept>
#include <string>

#include "downwash/geometry.hpp"

namespace downwash {

/// Raised when a simulation or solver produces or receives non-finite numbers,
/// or fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace dynamics {

inline constexpr int kStateDim = 7;
inline constexpr int kInputDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

struct VehicleState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double psi = 0.0;

  StateVector as_vector() const;
  static VehicleState from_vector(const StateVector& x);
};

struct ControlInput {
  Vec3 a = Vec3::Zero();
  double psi_rate = 0.0;

  InputVector as_vector() const;
};

struct AttitudeTarget {
  double roll = 0.0;
  double pitch = 0.0;
  double psi_rate = 0.0;
  double thrust = 0.0;
};

struct VehicleParams {
  double mass = 0.7;
  double g = 9.81;
  double a_max = 8.0;
  double body_span = 0.26;
};

struct LinearSystem {
  StateMatrix a;
  InputMatrix b;
  StateMatrix c;
};

LinearSystem linear_system();

/// Scale the acceleration command so that its norm does not exceed a_max.
ControlInput clamp_input(ControlInput u, double a_max);

/// One RK4 step with u and f_ext held over dt. f_ext drives only the
/// acceleration channels. psi is wrapped to (-pi, pi] afterwards.
VehicleState step(const VehicleState& state, const ControlInput& u, const Vec3& f_ext, double dt);

/// Thrust and roll/pitch that realise a_des at yaw psi under
/// m a = -R e3 T + m g e3 (ZYX Euler angles).
AttitudeTarget inversion_map(const Vec3& a_des, double psi, const VehicleParams& params);

/// Acceleration produced by an attitude target at yaw psi; the forward model
/// the inversion map inverts.
Vec3 acceleration_from_attitude(const AttitudeTarget& target, double psi, const VehicleParams& params);

}  // namespace dynamics
}  // namespace downwash

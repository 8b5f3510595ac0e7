#include "downwash/dynamics.hpp"

#include <cmath>

namespace downwash::dynamics {

StateVector VehicleState::as_vector() const {
  StateVector x;
  x << p, v, psi;
  return x;
}

VehicleState VehicleState::from_vector(const StateVector& x) {
  return {x.head<3>(), x.segment<3>(3), x(6)};
}

InputVector ControlInput::as_vector() const {
  InputVector u;
  u << a, psi_rate;
  return u;
}

LinearSystem linear_system() {
  LinearSystem sys;
  sys.a.setZero();
  sys.a.block<3, 3>(0, 3).setIdentity();
  sys.b.setZero();
  sys.b.block<3, 3>(3, 0).setIdentity();
  sys.b(6, 3) = 1.0;
  sys.c.setIdentity();
  return sys;
}

ControlInput clamp_input(ControlInput u, double a_max) {
  const double n = u.a.norm();
  if (n > a_max) u.a *= a_max / n;
  return u;
}

namespace {

StateVector derivative(const StateVector& x, const InputVector& u_total) {
  // A x + B u, written out for the block structure of the plant.
  StateVector dx;
  dx.head<3>() = x.segment<3>(3);
  dx.segment<3>(3) = u_total.head<3>();
  dx(6) = u_total(3);
  return dx;
}

}  // namespace

VehicleState step(const VehicleState& state, const ControlInput& u, const Vec3& f_ext, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive and finite");
  const StateVector x = state.as_vector();
  if (!x.allFinite() || !u.as_vector().allFinite() || !f_ext.allFinite()) {
    throw NumericalError("step: non-finite state, input or disturbance");
  }
  InputVector u_total = u.as_vector();
  u_total.head<3>() += f_ext;

  const StateVector k1 = derivative(x, u_total);
  const StateVector k2 = derivative(x + 0.5 * dt * k1, u_total);
  const StateVector k3 = derivative(x + 0.5 * dt * k2, u_total);
  const StateVector k4 = derivative(x + dt * k3, u_total);
  VehicleState next = VehicleState::from_vector(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  next.psi = geometry::wrap_pi(next.psi);
  return next;
}

AttitudeTarget inversion_map(const Vec3& a_des, double psi, const VehicleParams& params) {
  if (!(params.mass > 0.0)) throw std::invalid_argument("inversion_map: mass must be positive");
  const Vec3 specific_thrust = params.g * Vec3::UnitZ() - a_des;
  const double magnitude = specific_thrust.norm();
  if (!(magnitude >= 0.1 * params.g)) {
    throw NumericalError("inversion_map: commanded acceleration is within the free-fall singularity");
  }
  // Body down axis expressed in the yaw-aligned frame: [s(th) c(ph), -s(ph), c(th) c(ph)].
  const Vec3 b3 = geometry::rotation_z(-psi) * (specific_thrust / magnitude);
  if (!(b3.z() > 0.0)) {
    throw NumericalError("inversion_map: commanded acceleration requires tilt beyond 90 degrees");
  }
  AttitudeTarget out;
  out.thrust = params.mass * magnitude;
  out.roll = std::atan2(-b3.y(), std::hypot(b3.x(), b3.z()));
  out.pitch = std::atan2(b3.x(), b3.z());
  return out;
}

Vec3 acceleration_from_attitude(const AttitudeTarget& target, double psi, const VehicleParams& params) {
  const Mat3 r = (Eigen::AngleAxisd(psi, Vec3::UnitZ()) * Eigen::AngleAxisd(target.pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(target.roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return -r * Vec3::UnitZ() * (target.thrust / params.mass) + params.g * Vec3::UnitZ();
}

}  // namespace downwash::dynamics

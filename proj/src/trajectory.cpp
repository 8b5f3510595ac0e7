#include "downwash/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace downwash::pipeline {

TrajectoryPoint HoverTrajectory::at(double /*t*/) const {
  TrajectoryPoint pt;
  pt.p_ref = p0;
  return pt;
}

TrajectoryPoint LemniscateTrajectory::at(double t) const {
  if (!(period > 0.0)) throw std::invalid_argument("lemniscate: period must be positive");
  const double w = 2.0 * std::numbers::pi / period;
  const double tau = t + phase;
  TrajectoryPoint pt;
  pt.p_ref = center + Vec3(a * std::sin(w * tau), b * std::sin(2.0 * w * tau), 0.0);
  pt.v_ref = Vec3(a * w * std::cos(w * tau), 2.0 * b * w * std::cos(2.0 * w * tau), 0.0);
  pt.a_ff = Vec3(-a * w * w * std::sin(w * tau), -4.0 * b * w * w * std::sin(2.0 * w * tau), 0.0);
  return pt;
}

void TransectTrajectory::validate() const {
  if (!(speed > 0.0) || !(turn_time > 0.0)) throw std::invalid_argument("transect: speed and turn_time must be positive");
  if (span < speed * turn_time / std::numbers::pi) {
    throw std::invalid_argument("transect: span too short for the reversal profile");
  }
}

double TransectTrajectory::cycle_duration() const {
  const double cruise = 2.0 * span - 2.0 * speed * turn_time / std::numbers::pi;
  return 2.0 * turn_time + 2.0 * cruise / speed;
}

TrajectoryPoint TransectTrajectory::at(double t) const {
  validate();
  const double pi = std::numbers::pi;
  const double v = speed;
  const double tt = turn_time;
  const double reach = v * tt / pi;  // distance covered while reversing from full speed to rest
  const double cruise_time = (2.0 * span - 2.0 * reach) / v;

  double tau = std::fmod(t, cycle_duration());
  if (tau < 0.0) tau += cycle_duration();

  double s = 0.0, ds = 0.0, dds = 0.0;
  if (tau < 0.5 * tt) {  // leave -span
    s = -span + reach * (1.0 - std::cos(pi * tau / tt));
    ds = v * std::sin(pi * tau / tt);
    dds = v * pi / tt * std::cos(pi * tau / tt);
  } else if ((tau -= 0.5 * tt) < cruise_time) {
    s = -span + reach + v * tau;
    ds = v;
  } else if ((tau -= cruise_time) < tt) {  // reverse at +span
    s = span - reach + reach * std::sin(pi * tau / tt);
    ds = v * std::cos(pi * tau / tt);
    dds = -v * pi / tt * std::sin(pi * tau / tt);
  } else if ((tau -= tt) < cruise_time) {
    s = span - reach - v * tau;
    ds = -v;
  } else {  // arrive at -span
    tau -= cruise_time;
    s = -span + reach - reach * std::sin(pi * tau / tt);
    ds = -v * std::cos(pi * tau / tt);
    dds = v * pi / tt * std::sin(pi * tau / tt);
  }
  const Mat3 rot = geometry::rotation_z(heading);
  TrajectoryPoint pt;
  pt.p_ref = rot * Vec3(e1_fix, s, 0.0) + Vec3(origin.x(), origin.y(), depth);
  pt.v_ref = rot * Vec3(0.0, ds, 0.0);
  pt.a_ff = rot * Vec3(0.0, dds, 0.0);
  return pt;
}

TrajectoryPoint sample(const Trajectory& traj, double t) {
  return std::visit([t](const auto& tr) { return tr.at(t); }, traj);
}

}  // namespace downwash::pipeline

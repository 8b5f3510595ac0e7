#pragma once

// Reference trajectories for the follower. Each type maps time to a
// TrajectoryPoint with analytic velocity and acceleration feedforward.

#include <variant>

#include "downwash/control.hpp"

namespace downwash::pipeline {

using control::TrajectoryPoint;

struct HoverTrajectory {
  Vec3 p0 = Vec3::Zero();

  TrajectoryPoint at(double t) const;
};

/// p(t) = center + (A sin(2 pi (t + phase) / T), B sin(4 pi (t + phase) / T), 0).
struct LemniscateTrajectory {
  Vec3 center = Vec3::Zero();
  double a = 1.5;
  double b = 0.75;
  double period = 28.0;
  double phase = 0.0;

  TrajectoryPoint at(double t) const;
};

/// Back-and-forth along e2 between -span and +span at e1 = e1_fix and e3 =
/// depth. Passes are flown at constant speed; each reversal is a
/// half-cosine velocity profile lasting turn_time. Starts at rest at -span.
/// A non-zero heading rotates the whole pattern about e3 through `origin`.
struct TransectTrajectory {
  double e1_fix = 0.2;
  double heading = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double depth = -1.9;
  double speed = 0.5;
  double span = 1.5;
  double turn_time = 2.0;

  TrajectoryPoint at(double t) const;
  /// Duration of one full back-and-forth cycle.
  double cycle_duration() const;
  void validate() const;
};

using Trajectory = std::variant<HoverTrajectory, LemniscateTrajectory, TransectTrajectory>;

TrajectoryPoint sample(const Trajectory& traj, double t);

}  // namespace downwash::pipeline

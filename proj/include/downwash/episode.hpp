#pragma once

// Closed-loop two-vehicle episodes: the leader hovers under its own LQR, the
// follower tracks a reference while the oracle field acts on it.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "downwash/field.hpp"
#include "downwash/models.hpp"
#include "downwash/trajectory.hpp"

namespace downwash::pipeline {

/// Force prediction used for compensation: (x, r_ma) -> f_hat.
using ForcePredictor = std::function<Vec3(const geometry::InteractionState&, const Mat3&)>;

ForcePredictor model_predictor(const learning::ForceModel& model);
/// Feeds the simulated field itself back as the prediction.
ForcePredictor oracle_predictor(const field::FieldParams& params);

struct FlightLogRow {
  double t = 0.0;
  dynamics::VehicleState state_leader;
  dynamics::VehicleState state_follower;
  TrajectoryPoint ref_follower;
  dynamics::ControlInput u_fb;   // unclamped feedback before compensation
  dynamics::ControlInput u_cmd;  // command actually applied
  Vec3 f_pred = Vec3::Zero();
  Vec3 a_meas = Vec3::Zero();
  Vec3 f_true = Vec3::Zero();
};

struct FlightLog {
  double dt = 0.02;
  std::vector<FlightLogRow> rows;

  geometry::InteractionState interaction(std::size_t i) const;
};

struct EpisodeSettings {
  double duration = 28.0;
  double dt = 0.02;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
  /// Re-evaluate the predictor every n control steps and hold it in between.
  int model_hold_steps = 1;
  Vec3 leader_position = Vec3(0.0, 0.0, -2.5);
  dynamics::VehicleParams vehicle;
  control::LqrGains gains = control::design_lqr();
};

/// Runs one episode. `field` absent means no disturbance; `predictor` absent
/// means f_hat = 0. a_meas is the velocity difference across the control
/// interval (the central difference about its midpoint) plus Gaussian noise.
FlightLog run_episode(const Trajectory& traj, const std::optional<ForcePredictor>& predictor,
                      const std::optional<field::FieldParams>& field, const EpisodeSettings& settings);

void write_flight_log_csv(const FlightLog& log, std::ostream& out);
void write_flight_log_csv(const FlightLog& log, const std::string& path);
std::string flight_log_columns();

}  // namespace downwash::pipeline

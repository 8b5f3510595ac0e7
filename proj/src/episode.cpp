#include "downwash/episode.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

namespace downwash::pipeline {

ForcePredictor model_predictor(const learning::ForceModel& model) {
  return [&model](const geometry::InteractionState& x, const Mat3& r_ma) { return model.predict(x, r_ma); };
}

ForcePredictor oracle_predictor(const field::FieldParams& params) {
  return [params](const geometry::InteractionState& x, const Mat3& r_ma) {
    return field::perturbed_force(x, r_ma, params);
  };
}

geometry::InteractionState FlightLog::interaction(std::size_t i) const {
  const auto& r = rows.at(i);
  return {r.state_leader.p - r.state_follower.p, r.state_leader.v, r.state_follower.v};
}

FlightLog run_episode(const Trajectory& traj, const std::optional<ForcePredictor>& predictor,
                      const std::optional<field::FieldParams>& field, const EpisodeSettings& settings) {
  if (!(settings.dt > 0.0) || !(settings.duration >= 0.0)) {
    throw std::invalid_argument("run_episode: dt must be positive and duration non-negative");
  }
  if (settings.model_hold_steps < 1) throw std::invalid_argument("run_episode: model_hold_steps must be >= 1");
  if (field) field->validate();

  const auto steps = static_cast<std::size_t>(std::llround(settings.duration / settings.dt));
  const double a_max = settings.vehicle.a_max;
  std::mt19937_64 rng(settings.seed);

  const HoverTrajectory leader_traj{settings.leader_position};
  dynamics::VehicleState leader{settings.leader_position, Vec3::Zero(), 0.0};
  const TrajectoryPoint start = sample(traj, 0.0);
  dynamics::VehicleState follower{start.p_ref, start.v_ref, start.psi_ref};

  FlightLog log;
  log.dt = settings.dt;
  log.rows.reserve(steps);
  Vec3 f_pred = Vec3::Zero();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * settings.dt;
    const TrajectoryPoint ref = sample(traj, t);
    const geometry::InteractionState x{leader.p - follower.p, leader.v, follower.v};
    // Inertial -> leader body rotation for a level leader at yaw psi.
    const Mat3 r_ma = geometry::rotation_z(leader.psi).transpose();

    const Vec3 f_true = field ? field::perturbed_force(x, r_ma, *field) : Vec3::Zero();
    if (predictor && k % static_cast<std::size_t>(settings.model_hold_steps) == 0) f_pred = (*predictor)(x, r_ma);

    FlightLogRow row;
    row.t = t;
    row.state_leader = leader;
    row.state_follower = follower;
    row.ref_follower = ref;
    row.u_fb = control::raw_feedback(follower, ref, settings.gains);
    row.u_cmd = control::compensated_feedback(follower, ref, settings.gains, f_pred, a_max);
    row.f_pred = f_pred;
    row.f_true = f_true;

    const dynamics::ControlInput u_leader = control::feedback(leader, leader_traj.at(t), settings.gains, a_max);
    const dynamics::VehicleState next_follower = dynamics::step(follower, row.u_cmd, f_true, settings.dt);
    leader = dynamics::step(leader, u_leader, Vec3::Zero(), settings.dt);

    row.a_meas = field::noisy_accel((next_follower.v - follower.v) / settings.dt, settings.noise_sigma, rng);
    follower = next_follower;
    if (!follower.as_vector().allFinite() || !leader.as_vector().allFinite() || !row.a_meas.allFinite()) {
      throw NumericalError("run_episode: non-finite state at step " + std::to_string(k));
    }
    log.rows.push_back(row);
  }
  return log;
}

std::string flight_log_columns() {
  return "t,"
         "a_pn,a_pe,a_pd,a_vn,a_ve,a_vd,a_psi,"
         "b_pn,b_pe,b_pd,b_vn,b_ve,b_vd,b_psi,"
         "ref_pn,ref_pe,ref_pd,ref_vn,ref_ve,ref_vd,ref_psi,"
         "ufb_an,ufb_ae,ufb_ad,ufb_psi_rate,"
         "ucmd_an,ucmd_ae,ucmd_ad,ucmd_psi_rate,"
         "fpred_n,fpred_e,fpred_d,"
         "ameas_n,ameas_e,ameas_d,"
         "ftrue_n,ftrue_e,ftrue_d";
}

void write_flight_log_csv(const FlightLog& log, std::ostream& out) {
  out << flight_log_columns() << '\n' << std::setprecision(17);
  const auto vec = [&out](const Vec3& v) { out << ',' << v.x() << ',' << v.y() << ',' << v.z(); };
  for (const auto& r : log.rows) {
    out << r.t;
    vec(r.state_leader.p);
    vec(r.state_leader.v);
    out << ',' << r.state_leader.psi;
    vec(r.state_follower.p);
    vec(r.state_follower.v);
    out << ',' << r.state_follower.psi;
    vec(r.ref_follower.p_ref);
    vec(r.ref_follower.v_ref);
    out << ',' << r.ref_follower.psi_ref;
    vec(r.u_fb.a);
    out << ',' << r.u_fb.psi_rate;
    vec(r.u_cmd.a);
    out << ',' << r.u_cmd.psi_rate;
    vec(r.f_pred);
    vec(r.a_meas);
    vec(r.f_true);
    out << '\n';
  }
}

void write_flight_log_csv(const FlightLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_flight_log_csv(log, out);
}

}  // namespace downwash::pipeline

#pragma once

// LQR synthesis and the feedback laws used by both vehicles.

#include <optional>

#include "downwash/dynamics.hpp"

namespace downwash::control {

struct CostWeights {
  Eigen::Matrix<double, 7, 1> q_diag = (Eigen::Matrix<double, 7, 1>() << 10, 10, 10, 4, 4, 4, 2).finished();
  Eigen::Matrix<double, 4, 1> r_diag = Eigen::Matrix<double, 4, 1>::Ones();
};

struct LqrGains {
  Eigen::Matrix<double, 4, 7> k;
  Eigen::Matrix<double, 7, 7> p;
};

/// Reference state. a_ff is an acceleration feedforward added to the
/// feedback command; it is zero for set-point references.
struct TrajectoryPoint {
  Vec3 p_ref = Vec3::Zero();
  Vec3 v_ref = Vec3::Zero();
  double psi_ref = 0.0;
  Vec3 a_ff = Vec3::Zero();
};

struct CareOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
};

struct CareResult {
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;
  int iterations = 0;
  double residual = 0.0;
};

/// max-abs of A'P + PA - P B R^-1 B' P + Q.
double care_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p);

/// Solve (A - BK)' P + P (A - BK) = -S by a dense Kronecker-vectorised solve.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& closed_loop, const Eigen::MatrixXd& s);

/// Stabilising PD gain for plants built from k double-integrator axes followed
/// by m single integrators (state [p(k), v(k), s(m)], input [a(k), r(m)]).
/// Poles at -1.5 and -2 per double integrator, -2 per single integrator.
Eigen::MatrixXd pole_placement_seed(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Continuous algebraic Riccati equation by Newton-Kleinman iteration.
/// Throws NumericalError when the seed is not stabilising or the iteration
/// does not reach the tolerance.
CareResult solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                      const Eigen::MatrixXd& r, std::optional<Eigen::MatrixXd> seed = std::nullopt,
                      const CareOptions& options = {});

LqrGains design_lqr(const CostWeights& weights = {});

dynamics::ControlInput feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref, const LqrGains& gains,
                                double a_max);

/// Feedback with the predicted disturbance subtracted from the acceleration
/// channels before clamping.
dynamics::ControlInput compensated_feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref,
                                            const LqrGains& gains, const Vec3& f_hat, double a_max);

/// Unclamped -K (x - x_r) + a_ff, yaw error wrapped.
dynamics::ControlInput raw_feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref,
                                    const LqrGains& gains);

}  // namespace downwash::control

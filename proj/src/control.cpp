#include "downwash/control.hpp"

#include <string>

namespace downwash::control {

using Eigen::MatrixXd;

double care_residual(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                     const MatrixXd& p) {
  const MatrixXd r_inv_bt = r.ldlt().solve(b.transpose());
  const MatrixXd res = a.transpose() * p + p * a - p * b * r_inv_bt * p + q;
  return res.cwiseAbs().maxCoeff();
}

MatrixXd solve_lyapunov(const MatrixXd& closed_loop, const MatrixXd& s) {
  const Eigen::Index n = closed_loop.rows();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  // Column-major vec: vec(Ac' P) = (I kron Ac') vec(P), vec(P Ac) = (Ac' kron I) vec(P).
  MatrixXd op = MatrixXd::Zero(n * n, n * n);
  const MatrixXd act = closed_loop.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) = eye(i, j) * act + act(i, j) * eye;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(s.data(), n * n);
  const Eigen::VectorXd vec_p = op.partialPivLu().solve(rhs);
  MatrixXd p = Eigen::Map<const MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (p + p.transpose());
}

MatrixXd pole_placement_seed(const MatrixXd& a, const MatrixXd& b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index n_in = b.cols();
  const Eigen::Index k = n - n_in;
  const Eigen::Index m = n_in - k;
  if (k < 0 || m < 0 || b.rows() != n || a.cols() != n) {
    throw std::invalid_argument("pole_placement_seed: plant is not a chain of double and single integrators");
  }
  MatrixXd seed = MatrixXd::Zero(n_in, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    seed(i, i) = 3.0;        // (s + 1.5)(s + 2)
    seed(i, k + i) = 3.5;
  }
  for (Eigen::Index j = 0; j < m; ++j) seed(k + j, 2 * k + j) = 2.0;
  return seed;
}

CareResult solve_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r,
                      std::optional<MatrixXd> seed, const CareOptions& options) {
  MatrixXd gain = seed ? *seed : pole_placement_seed(a, b);
  const auto r_factor = r.ldlt();
  if (r_factor.info() != Eigen::Success || !r_factor.isPositive()) {
    throw std::invalid_argument("solve_care: R must be positive definite");
  }
  CareResult result;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const MatrixXd closed_loop = a - b * gain;
    const MatrixXd p = solve_lyapunov(closed_loop, q + gain.transpose() * r * gain);
    if (!p.allFinite() || p.llt().info() != Eigen::Success) {
      throw NumericalError("solve_care: Lyapunov solution is not positive definite (gain " +
                           std::to_string(it - 1) + " is not stabilising)");
    }
    gain = r_factor.solve(b.transpose() * p);
    result.p = p;
    result.k = gain;
    result.iterations = it;
    result.residual = care_residual(a, b, q, r, p);
    if (result.residual < options.tolerance) return result;
  }
  throw NumericalError("solve_care: no convergence after " + std::to_string(options.max_iterations) +
                       " iterations (residual " + std::to_string(result.residual) + ")");
}

LqrGains design_lqr(const CostWeights& weights) {
  if ((weights.q_diag.array() <= 0.0).any() || (weights.r_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("design_lqr: cost weights must be strictly positive");
  }
  const dynamics::LinearSystem sys = dynamics::linear_system();
  const MatrixXd q = weights.q_diag.asDiagonal();
  const MatrixXd r = weights.r_diag.asDiagonal();
  const CareResult care = solve_care(sys.a, sys.b, q, r);
  return {care.k, care.p};
}

dynamics::ControlInput raw_feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref,
                                    const LqrGains& gains) {
  dynamics::StateVector err;
  err << x.p - ref.p_ref, x.v - ref.v_ref, geometry::wrap_pi(x.psi - ref.psi_ref);
  const dynamics::InputVector u = -gains.k * err;
  return {u.head<3>() + ref.a_ff, u(3)};
}

dynamics::ControlInput feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref, const LqrGains& gains,
                                double a_max) {
  return dynamics::clamp_input(raw_feedback(x, ref, gains), a_max);
}

dynamics::ControlInput compensated_feedback(const dynamics::VehicleState& x, const TrajectoryPoint& ref,
                                            const LqrGains& gains, const Vec3& f_hat, double a_max) {
  if (!f_hat.allFinite()) throw NumericalError("compensated_feedback: non-finite force prediction");
  dynamics::ControlInput u = raw_feedback(x, ref, gains);
  u.a -= f_hat;
  return dynamics::clamp_input(u, a_max);
}

}  // namespace downwash::control

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "downwash/control.hpp"

using namespace downwash;
using namespace downwash::control;

namespace {

struct DoubleIntegrator {
  Eigen::MatrixXd a = (Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished();
  Eigen::MatrixXd b = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(1, 1);
};

}  // namespace

TEST(Care, DoubleIntegratorClosedForm) {
  const DoubleIntegrator s;
  const CareResult res = solve_care(s.a, s.b, s.q, s.r);
  Eigen::Matrix2d expected;
  expected << std::sqrt(3.0), 1.0, 1.0, std::sqrt(3.0);
  EXPECT_LT((res.p - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(res.residual, 1e-9);
  EXPECT_NEAR(res.k(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(res.k(0, 1), std::sqrt(3.0), 1e-9);
}

TEST(Care, FullPlantResidualAndSymmetry) {
  const auto sys = dynamics::linear_system();
  const CostWeights w;
  const Eigen::MatrixXd q = w.q_diag.asDiagonal();
  const Eigen::MatrixXd r = w.r_diag.asDiagonal();
  const CareResult res = solve_care(sys.a, sys.b, q, r);
  EXPECT_LT(care_residual(sys.a, sys.b, q, r, res.p), 1e-8);
  EXPECT_LT((res.p - res.p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(res.p);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  const Eigen::MatrixXd closed = sys.a - sys.b * res.k;
  EXPECT_LT(closed.eigenvalues().real().maxCoeff(), 0.0);
}

TEST(Care, RejectsDestabilisingSeed) {
  const DoubleIntegrator s;
  const Eigen::MatrixXd bad = (Eigen::MatrixXd(1, 2) << -1.0, 0.0).finished();
  EXPECT_THROW(solve_care(s.a, s.b, s.q, s.r, bad), NumericalError);
}

TEST(Care, ReportsNonConvergence) {
  const DoubleIntegrator s;
  CareOptions opts;
  opts.max_iterations = 1;
  opts.tolerance = 1e-300;
  EXPECT_THROW(solve_care(s.a, s.b, s.q, s.r, std::nullopt, opts), NumericalError);
}

TEST(Lyapunov, SatisfiesEquation) {
  Eigen::MatrixXd a(3, 3);
  a << -1, 2, 0, 0, -3, 1, 0.5, 0, -2;
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd p = solve_lyapunov(a, s);
  EXPECT_LT((a.transpose() * p + p * a + s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PolePlacement, StabilisesPlant) {
  const auto sys = dynamics::linear_system();
  const Eigen::MatrixXd k = pole_placement_seed(sys.a, sys.b);
  const Eigen::MatrixXd closed = Eigen::MatrixXd(sys.a) - Eigen::MatrixXd(sys.b) * k;
  EXPECT_LT(closed.eigenvalues().real().maxCoeff(), -1.0);
}

TEST(Feedback, ZeroAtReferenceAndYawErrorWrapped) {
  const LqrGains g = design_lqr();
  dynamics::VehicleState x{Vec3(1, 2, 3), Vec3(0.1, 0, 0), 0.2};
  TrajectoryPoint ref{x.p, x.v, x.psi, Vec3(0.3, 0, 0)};
  const auto u = raw_feedback(x, ref, g);
  EXPECT_LT((u.a - Vec3(0.3, 0, 0)).norm(), 1e-15);
  EXPECT_EQ(u.psi_rate, 0.0);

  x.psi = std::numbers::pi - 0.05;
  ref.psi_ref = -std::numbers::pi + 0.05;
  const auto wrapped = raw_feedback(x, ref, g);
  x.psi = -0.05;
  ref.psi_ref = 0.05;
  const auto direct = raw_feedback(x, ref, g);
  EXPECT_NEAR(wrapped.psi_rate, direct.psi_rate, 1e-12);
}

TEST(Feedback, CompensationSubtractsThenClamps) {
  const LqrGains g = design_lqr();
  const dynamics::VehicleState x{Vec3(0, 0, -1), Vec3::Zero(), 0.0};
  const TrajectoryPoint ref{Vec3(0, 0, -1), Vec3::Zero(), 0.0, Vec3::Zero()};
  const Vec3 f_hat(0.5, -0.25, 1.0);
  EXPECT_LT((compensated_feedback(x, ref, g, f_hat, 8.0).a + f_hat).norm(), 1e-15);
  EXPECT_NEAR(compensated_feedback(x, ref, g, Vec3(0, 0, 20.0), 8.0).a.norm(), 8.0, 1e-12);
  const TrajectoryPoint far{Vec3(100, 0, 0), Vec3::Zero(), 0.0, Vec3::Zero()};
  EXPECT_NEAR(feedback(x, far, g, 8.0).a.norm(), 8.0, 1e-12);
}

TEST(ClosedLoop, ContractsFromUnitErrors) {
  const LqrGains g = design_lqr();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const TrajectoryPoint ref{Vec3(0.5, -0.5, -2.0), Vec3::Zero(), 0.3, Vec3::Zero()};
  const dynamics::StateVector xr = dynamics::VehicleState{ref.p_ref, ref.v_ref, ref.psi_ref}.as_vector();
  for (int trial = 0; trial < 100; ++trial) {
    dynamics::StateVector e;
    for (int i = 0; i < 7; ++i) e(i) = n(rng);
    e.normalize();
    auto x = dynamics::VehicleState::from_vector(xr + e);
    for (int k = 0; k < 250; ++k) x = dynamics::step(x, feedback(x, ref, g, 8.0), Vec3::Zero(), 0.02);
    dynamics::StateVector err = x.as_vector() - xr;
    err(6) = geometry::wrap_pi(err(6));
    EXPECT_LT(err.norm(), 1e-3);
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "downwash/mlp.hpp"

using namespace downwash::learning;

TEST(Mlp, HandComputedSingleHiddenUnit) {
  DenseLayer l1{Eigen::MatrixXd(1, 2), Eigen::VectorXd(1)};
  l1.weight << 1.0, -2.0;
  l1.bias << 0.5;
  DenseLayer l2{Eigen::MatrixXd(1, 1), Eigen::VectorXd(1)};
  l2.weight << 3.0;
  l2.bias << -1.0;
  const Mlp net({l1, l2});
  // relu(1*2 - 2*0.5 + 0.5) = 1.5 -> 3*1.5 - 1 = 3.5
  EXPECT_DOUBLE_EQ(net.forward(Eigen::Vector2d(2.0, 0.5))(0), 3.5);
  // relu(1*0 - 2*1 + 0.5) = 0 -> -1
  EXPECT_DOUBLE_EQ(net.forward(Eigen::Vector2d(0.0, 1.0))(0), -1.0);
  EXPECT_EQ(net.parameter_count(), 5u);
  EXPECT_EQ(net.depth(), 3);
}

TEST(Mlp, ShapesAndCounts) {
  std::mt19937_64 rng(1);
  const std::vector<int> w = {5, 32, 2};
  const Mlp net = Mlp::random(w, rng);
  EXPECT_EQ(net.parameter_count(), 258u);
  EXPECT_EQ(net.widths(), w);
  EXPECT_EQ(net.input_dim(), 5);
  EXPECT_EQ(net.output_dim(), 2);
  EXPECT_THROW(net.forward(Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST(Mlp, FlattenRoundTripAndOrder) {
  std::mt19937_64 rng(2);
  const std::vector<int> w = {3, 4, 2};
  Mlp net = Mlp::random(w, rng);
  const Eigen::VectorXd theta = net.flatten();
  EXPECT_EQ(theta(1), net.layers()[0].weight(0, 1));  // row-major
  EXPECT_EQ(theta(12), net.layers()[0].bias(0));
  Mlp other = Mlp::zeros(w);
  other.unflatten(theta);
  EXPECT_EQ(other.flatten(), theta);
  EXPECT_THROW(other.unflatten(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Mlp, BatchMatchesSingle) {
  std::mt19937_64 rng(3);
  const std::vector<int> w = {4, 8, 8, 3};
  const Mlp net = Mlp::random(w, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 10);
  const Eigen::MatrixXd y = net.forward_batch(x);
  for (int i = 0; i < 10; ++i) EXPECT_LT((y.col(i) - net.forward(x.col(i))).norm(), 1e-14);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const std::vector<int> w = {3, 6, 5, 2};
  Mlp net = Mlp::random(w, rng);
  for (auto& l : net.layers()) l.bias.setRandom();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 7);
  const Eigen::MatrixXd target = Eigen::MatrixXd::Random(2, 7);
  const auto loss = [&](const Mlp& m) { return 0.5 * (m.forward_batch(x) - target).squaredNorm(); };
  ForwardTape tape;
  const Eigen::MatrixXd out = net.forward_batch(x, tape);
  const Eigen::VectorXd g = Mlp::flatten(net.backward(tape, out - target));
  const Eigen::VectorXd theta = net.flatten();
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    Mlp a = net, b = net;
    a.unflatten(tp);
    b.unflatten(tm);
    const double fd = (loss(a) - loss(b)) / (2 * h);
    EXPECT_NEAR(g(i), fd, 1e-6 * std::max(1.0, std::abs(fd))) << "parameter " << i;
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd g(4);
  g << 0.3, -2.0, 1e-3, 0.0;
  AdamState s = AdamState::zeros(4);
  const AdamConfig cfg;
  adam_step(p, g, s, cfg);
  EXPECT_NEAR(p(0), -cfg.learning_rate, 1e-9);
  EXPECT_NEAR(p(1), cfg.learning_rate, 1e-9);
  EXPECT_NEAR(p(2), -cfg.learning_rate, 1e-7);
  EXPECT_EQ(p(3), 0.0);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, ZeroGradientLeavesParametersAndDecaysMoments) {
  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  AdamState s = AdamState::zeros(2);
  s.m.setConstant(1.0);
  s.v.setConstant(1.0);
  s.step = 10;
  Eigen::VectorXd before = p;
  adam_step(p, Eigen::VectorXd::Zero(2), s, AdamConfig{});
  EXPECT_LT(s.m(0), 1.0);
  EXPECT_LT(s.v(0), 1.0);
  // With accumulated momentum the step is not zero; with fresh state it is.
  AdamState fresh = AdamState::zeros(2);
  adam_step(before, Eigen::VectorXd::Zero(2), fresh, AdamConfig{});
  EXPECT_EQ(before, Eigen::VectorXd::Ones(2));
}

TEST(Spectral, DiagonalExample) {
  const Eigen::Matrix2d w = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  EXPECT_NEAR(spectral_norm_estimate(w), 3.0, 1e-9);
  const Eigen::MatrixXd n = spectral_normalize(w, 2.0);
  EXPECT_NEAR(n(0, 0), 2.0, 1e-9);
  EXPECT_NEAR(n(1, 1), 2.0 / 3.0, 1e-9);
  EXPECT_EQ(n(0, 1), 0.0);
}

TEST(Spectral, LeavesSmallMatricesAlone) {
  const Eigen::Matrix2d w = Eigen::Vector2d(1.5, 0.5).asDiagonal();
  EXPECT_EQ(spectral_normalize(w, 2.0), Eigen::MatrixXd(w));
}

TEST(Spectral, EstimateAgreesWithSvd) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd w(32, 32);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = n(rng);
    Eigen::VectorXd warm;
    double est = 0.0;
    for (int k = 0; k < 10; ++k) est = spectral_norm_estimate(w, 20, &warm);
    const double exact = Eigen::JacobiSVD<Eigen::MatrixXd>(w).singularValues()(0);
    EXPECT_LE(est, exact * (1 + 1e-12));
    EXPECT_NEAR(est, exact, 1e-3 * exact);
  }
}

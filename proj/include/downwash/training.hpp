#pragma once

#include <vector>

#include "downwash/models.hpp"

namespace downwash::learning {

/// Mean of squared componentwise errors over the three inertial axes.
double mse_loss(const Vec3& pred, const Vec3& label);

/// Residual force label. The applied acceleration command was
/// u_fb - f_pred_prev, so the unexplained force is a_meas - (u_fb - f_pred_prev).
Vec3 compute_label(const Vec3& a_meas, const Vec3& u_fb, const Vec3& f_pred_prev);

struct TrainResult {
  ForceModel model;
  std::vector<double> loss_history;  // mean minibatch loss per epoch
};

/// Mini-batch Adam over seeded shuffles. Fits the model's input
/// standardisation on `data` first. The deep baseline has every weight
/// matrix spectrally normalised after each optimiser step.
TrainResult train(ForceModel model, const Dataset& data, const TrainConfig& config);

/// Rescale every weight matrix so its power-iteration spectral norm is at most cap.
void apply_spectral_normalization(Mlp& net, double cap, int iterations, std::vector<Eigen::VectorXd>* warm = nullptr);

/// Rescale every weight matrix so its exact (SVD) spectral norm is at most cap.
/// Applied once after training, since power iteration slightly underestimates.
void project_spectral_norm(Mlp& net, double cap);

struct EvalMetrics {
  double rmse = 0.0;
  double rmse_lateral = 0.0;   // over e1, e2: sqrt((mse_n + mse_e) / 2)
  double rmse_vertical = 0.0;  // e3
  Vec3 rmse_axis = Vec3::Zero();
  std::size_t samples = 0;
};

EvalMetrics evaluate(const ForceModel& model, const Dataset& data);
/// Metrics of arbitrary predictions against the dataset labels.
EvalMetrics evaluate_predictions(const Eigen::Matrix3Xd& predictions, const Dataset& data);

}  // namespace downwash::learning

#include "downwash/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "downwash/dynamics.hpp"

namespace downwash::learning {

double mse_loss(const Vec3& pred, const Vec3& label) { return (pred - label).squaredNorm() / 3.0; }

Vec3 compute_label(const Vec3& a_meas, const Vec3& u_fb, const Vec3& f_pred_prev) {
  return a_meas - u_fb + f_pred_prev;
}

void apply_spectral_normalization(Mlp& net, double cap, int iterations, std::vector<Eigen::VectorXd>* warm) {
  auto& layers = net.layers();
  if (warm) warm->resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight = spectral_normalize(layers[l].weight, cap, iterations, warm ? &(*warm)[l] : nullptr);
  }
}

void project_spectral_norm(Mlp& net, double cap) {
  for (auto& layer : net.layers()) {
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(layer.weight).singularValues()(0);
    if (sigma > cap) layer.weight *= cap / sigma;
  }
}

TrainResult train(ForceModel model, const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("train: empty dataset");

  model.fit_standardizer(data);
  const PreparedBatch all = model.prepare(data);
  const bool spectral = model.kind() == ModelKind::deep_nonequiv;

  std::vector<Eigen::VectorXd> warm;
  if (spectral) apply_spectral_normalization(model.net(), config.spectral_cap, config.power_iterations, &warm);

  Eigen::VectorXd params = model.net().flatten();
  AdamState state = AdamState::zeros(params.size());
  const AdamConfig adam{config.learning_rate, config.beta1, config.beta2, config.epsilon};

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(all.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
  Eigen::VectorXd grad;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      const PreparedBatch mb = all.subset(std::span<const Eigen::Index>(order.data() + start, count));
      weighted += model.loss_and_gradient(mb, &grad) * static_cast<double>(count);
      adam_step(params, grad, state, adam);
      model.net().unflatten(params);
      if (spectral) {
        apply_spectral_normalization(model.net(), config.spectral_cap, config.power_iterations, &warm);
        params = model.net().flatten();
      }
    }
    const double epoch_loss = weighted / static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw NumericalError("train: loss became non-finite at epoch " + std::to_string(epoch));
    result.loss_history.push_back(epoch_loss);
  }
  if (spectral) project_spectral_norm(model.net(), config.spectral_cap);
  model.set_train_config(config);
  result.model = std::move(model);
  return result;
}

EvalMetrics evaluate_predictions(const Eigen::Matrix3Xd& predictions, const Dataset& data) {
  if (static_cast<std::size_t>(predictions.cols()) != data.size()) {
    throw std::invalid_argument("evaluate: prediction count does not match dataset");
  }
  EvalMetrics m;
  m.samples = data.size();
  if (data.empty()) return m;
  Vec3 sq = Vec3::Zero();
  for (std::size_t i = 0; i < data.size(); ++i) {
    sq += (predictions.col(static_cast<Eigen::Index>(i)) - data.rows[i].f_label).cwiseAbs2();
  }
  const Vec3 mse = sq / static_cast<double>(data.size());
  m.rmse_axis = mse.cwiseSqrt();
  m.rmse = std::sqrt(mse.sum() / 3.0);
  m.rmse_lateral = std::sqrt((mse.x() + mse.y()) / 2.0);
  m.rmse_vertical = std::sqrt(mse.z());
  return m;
}

EvalMetrics evaluate(const ForceModel& model, const Dataset& data) {
  if (data.empty()) return {};
  return evaluate_predictions(model.predict_prepared(model.prepare(data)), data);
}

}  // namespace downwash::learning

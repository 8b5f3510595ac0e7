#include "downwash/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace downwash::learning {

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weight.rows()) {
      throw std::invalid_argument("Mlp: bias size does not match weight rows in layer " + std::to_string(l));
    }
    if (l > 0 && layers_[l].weight.cols() != layers_[l - 1].weight.rows()) {
      throw std::invalid_argument("Mlp: incompatible dimensions between layers " + std::to_string(l - 1) + " and " +
                                  std::to_string(l));
    }
  }
}

Mlp Mlp::zeros(std::span<const int> widths) {
  if (widths.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers.push_back({Eigen::MatrixXd::Zero(widths[l + 1], widths[l]), Eigen::VectorXd::Zero(widths[l + 1])});
  }
  return Mlp(std::move(layers));
}

Mlp Mlp::random(std::span<const int> widths, std::mt19937_64& rng) {
  Mlp net = zeros(widths);
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    auto& w = net.layers_[l].weight;
    const bool last = l + 1 == net.layers_.size();
    const double gain = last ? 1.0 : 2.0;
    std::normal_distribution<double> dist(0.0, std::sqrt(gain / static_cast<double>(w.cols())));
    // Row-major fill so the draw order matches the serialised layout.
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
  }
  return net;
}

int Mlp::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }

int Mlp::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

std::vector<int> Mlp::widths() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(input_dim());
  for (const auto& layer : layers_) out.push_back(static_cast<int>(layer.weight.rows()));
  return out;
}

void Mlp::check_input(Eigen::Index rows) const {
  if (layers_.empty()) throw std::logic_error("Mlp: network has no layers");
  if (rows != input_dim()) {
    throw std::invalid_argument("Mlp: input dimension " + std::to_string(rows) + " does not match " +
                                std::to_string(input_dim()));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& w) const { return forward_batch(w); }

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x) const {
  check_input(x.rows());
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x, ForwardTape& tape) const {
  check_input(x.rows());
  tape.inputs.resize(layers_.size());
  tape.inputs[0] = x;
  Eigen::MatrixXd z;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    z.noalias() = layers_[l].weight * tape.inputs[l];
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) tape.inputs[l + 1] = z.cwiseMax(0.0);
  }
  return z;
}

std::vector<DenseLayer> Mlp::backward(const ForwardTape& tape, const Eigen::MatrixXd& d_output) const {
  if (tape.inputs.size() != layers_.size()) throw std::invalid_argument("Mlp::backward: tape does not match network");
  std::vector<DenseLayer> grads(layers_.size());
  Eigen::MatrixXd delta = d_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grads[l].weight.noalias() = delta * tape.inputs[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = layers_[l].weight.transpose() * delta;
    // ReLU mask: the recorded input of layer l is positive exactly where the
    // pre-activation of layer l-1 was.
    delta = (tape.inputs[l].array() > 0.0).select(upstream, 0.0);
  }
  return grads;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

Eigen::VectorXd Mlp::flatten(const std::vector<DenseLayer>& layers) {
  Eigen::Index n = 0;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  Eigen::VectorXd out(n);
  Eigen::Index k = 0;
  for (const auto& layer : layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) out(k++) = layer.weight(i, j);
    }
    out.segment(k, layer.bias.size()) = layer.bias;
    k += layer.bias.size();
  }
  return out;
}

Eigen::VectorXd Mlp::flatten() const { return flatten(layers_); }

void Mlp::unflatten(const Eigen::VectorXd& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) {
    throw std::invalid_argument("Mlp::unflatten: parameter vector has the wrong size");
  }
  Eigen::Index k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = params(k++);
    }
    layer.bias = params.segment(k, layer.bias.size());
    k += layer.bias.size();
  }
}

AdamState AdamState::zeros(Eigen::Index n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size() || grads.size() != params.size()) {
    throw std::invalid_argument("adam_step: state, gradient and parameter sizes differ");
  }
  ++state.step;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grads;
  state.v = config.beta2 * state.v + (1.0 - config.beta2) * grads.cwiseAbs2();
  const double m_correction = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double v_correction = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  params.array() -= config.learning_rate * (state.m.array() / m_correction) /
                    ((state.v.array() / v_correction).sqrt() + config.epsilon);
}

double spectral_norm_estimate(const Eigen::MatrixXd& w, int iterations, Eigen::VectorXd* warm) {
  if (w.size() == 0) return 0.0;
  Eigen::VectorXd v = (warm && warm->size() == w.cols() && warm->norm() > 0.0)
                          ? Eigen::VectorXd(warm->normalized())
                          : Eigen::VectorXd(Eigen::VectorXd::Ones(w.cols()).normalized());
  double sigma = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Eigen::VectorXd u = w * v;
    const Eigen::VectorXd next = w.transpose() * u;
    const double n = next.norm();
    if (n == 0.0) break;
    v = next / n;
  }
  sigma = (w * v).norm();
  if (warm) *warm = v;
  return sigma;
}

Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w, double cap, int iterations, Eigen::VectorXd* warm) {
  if (!(cap > 0.0)) throw std::invalid_argument("spectral_normalize: cap must be positive");
  const double sigma = spectral_norm_estimate(w, iterations, warm);
  if (sigma > cap) return w * (cap / sigma);
  return w;
}

}  // namespace downwash::learning

#pragma once

// Dense ReLU networks with reverse-mode gradients, Adam, and spectral
// normalisation. Batched calls take one sample per column.

#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace downwash::learning {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Activations recorded by a batched forward pass: inputs[l] is the input of
/// layer l (post-ReLU for l > 0).
struct ForwardTape {
  std::vector<Eigen::MatrixXd> inputs;
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  /// widths = {in, hidden..., out}.
  static Mlp zeros(std::span<const int> widths);
  /// He-normal weights for ReLU layers, 1/fan_in variance for the output layer, zero biases.
  static Mlp random(std::span<const int> widths, std::mt19937_64& rng);

  int input_dim() const;
  int output_dim() const;
  /// Number of neuron layers including input and output (weight layers + 1).
  int depth() const { return layers_.empty() ? 0 : static_cast<int>(layers_.size()) + 1; }
  std::vector<int> widths() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& w) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, ForwardTape& tape) const;

  /// Gradients of a scalar loss given dL/d(output) for each column.
  std::vector<DenseLayer> backward(const ForwardTape& tape, const Eigen::MatrixXd& d_output) const;

  std::size_t parameter_count() const;
  /// Layer by layer: weight (row-major) then bias.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
  static Eigen::VectorXd flatten(const std::vector<DenseLayer>& layers);

 private:
  void check_input(Eigen::Index rows) const;
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  static AdamState zeros(Eigen::Index n);
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, const AdamConfig& config);

/// Largest singular value by power iteration on W^T W. `warm`, when given and
/// of matching size, seeds the iteration and receives the final right vector.
double spectral_norm_estimate(const Eigen::MatrixXd& w, int iterations = 20, Eigen::VectorXd* warm = nullptr);

/// Rescale w by cap / sigma_max when the power-iteration estimate exceeds cap.
Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w, double cap = 2.0, int iterations = 20,
                                   Eigen::VectorXd* warm = nullptr);

}  // namespace downwash::learning

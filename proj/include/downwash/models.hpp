#pragma once

// Downwash force models: the SO(2)-equivariant model built on invariant
// features plus a polar-angle lift, and two non-equivariant baselines that
// read [delta_p, v_follower] directly.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "downwash/dataset.hpp"
#include "downwash/mlp.hpp"

namespace downwash::learning {

enum class ModelKind { equivariant, shallow_nonequiv, deep_nonequiv };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::string to_string(geometry::FeatureMode mode);
geometry::FeatureMode feature_mode_from_string(const std::string& name);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 300;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double spectral_cap = 2.0;  // deep baseline only
  int power_iterations = 20;
  int hidden_width = 32;
  std::vector<int> deep_hidden = {32, 32, 32, 32, 32, 32};

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Affine input normalisation: (x - mean) / scale.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer identity(int dim);
  static Standardizer fit(const Eigen::MatrixXd& samples);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& samples) const;
};

/// Inputs encoded for the network plus what the output map needs per sample.
struct PreparedBatch {
  Eigen::MatrixXd features;  // standardised network inputs, one column per sample
  Eigen::Matrix2Xd lift;     // (cos phi, sin phi); equivariant model only
  std::vector<Mat3> frames;  // empty means identity for every sample
  Eigen::Matrix3Xd labels;

  Eigen::Index size() const { return features.cols(); }
  PreparedBatch subset(std::span<const Eigen::Index> columns) const;
};

class ForceModel {
 public:
  ForceModel() = default;
  ForceModel(ModelKind kind, geometry::FeatureMode mode, Mlp net);

  ModelKind kind() const { return kind_; }
  geometry::FeatureMode mode() const { return mode_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_standardizer(Standardizer s);
  const std::optional<TrainConfig>& train_config() const { return train_config_; }
  void set_train_config(const TrainConfig& c) { train_config_ = c; }

  int input_dim() const;
  std::size_t parameter_count() const { return net_.parameter_count(); }

  /// Unstandardised network inputs for one sample.
  Eigen::VectorXd raw_features(const geometry::InteractionState& x, const Mat3& r_ma) const;
  /// Fit the standardiser on the dataset's inputs (identity leader frame).
  void fit_standardizer(const Dataset& data);

  Vec3 predict(const geometry::InteractionState& x, const Mat3& r_ma = Mat3::Identity()) const;
  Eigen::Matrix3Xd predict_batch(std::span<const geometry::InteractionState> xs) const;

  /// `frames` may be empty (identity) or one per sample; `labels` may be
  /// empty when only predictions are needed.
  PreparedBatch prepare(std::span<const geometry::InteractionState> xs, std::span<const Vec3> labels,
                        std::span<const Mat3> frames = {}) const;
  PreparedBatch prepare(const Dataset& data) const;

  Eigen::Matrix3Xd predict_prepared(const PreparedBatch& batch) const;
  /// Mean over samples and the three inertial axes of the squared error. When
  /// `grad` is non-null it receives the gradient in Mlp::flatten order.
  double loss_and_gradient(const PreparedBatch& batch, Eigen::VectorXd* grad) const;

  nlohmann::json to_json() const;
  static ForceModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static ForceModel load(const std::string& path);

 private:
  Eigen::Matrix3Xd output_map(const Eigen::MatrixXd& net_out, const PreparedBatch& batch) const;
  Eigen::MatrixXd output_map_adjoint(const Eigen::Matrix3Xd& d_force, const PreparedBatch& batch) const;

  ModelKind kind_ = ModelKind::equivariant;
  geometry::FeatureMode mode_ = geometry::FeatureMode::near_hover;
  Mlp net_;
  Standardizer standardizer_;
  std::optional<TrainConfig> train_config_;
};

inline constexpr const char* kModelFormat = "downwash-model/1";

/// f_theta: features -> (lateral magnitude, vertical); hidden width 32 by default.
ForceModel make_equivariant_model(geometry::FeatureMode mode, std::uint64_t seed, int hidden = 32);
/// [delta_p, v_follower] -> force, one hidden layer.
ForceModel make_shallow_baseline(std::uint64_t seed, int hidden = 32);
/// [delta_p, v_follower] -> force, hidden widths as given.
ForceModel make_deep_baseline(std::uint64_t seed, std::span<const int> hidden);
ForceModel make_model(ModelKind kind, geometry::FeatureMode mode, const TrainConfig& config);

/// Model with every parameter zero.
ForceModel zero_model(ModelKind kind, geometry::FeatureMode mode = geometry::FeatureMode::near_hover);

}  // namespace downwash::learning

#include "downwash/models.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace downwash::learning {

using geometry::FeatureMode;
using geometry::InteractionState;
using nlohmann::json;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::equivariant: return "equivariant";
    case ModelKind::shallow_nonequiv: return "shallow_nonequiv";
    case ModelKind::deep_nonequiv: return "deep_nonequiv";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "equivariant") return ModelKind::equivariant;
  if (name == "shallow_nonequiv" || name == "shallow") return ModelKind::shallow_nonequiv;
  if (name == "deep_nonequiv" || name == "deep") return ModelKind::deep_nonequiv;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

std::string to_string(FeatureMode mode) { return mode == FeatureMode::full ? "full" : "near_hover"; }

FeatureMode feature_mode_from_string(const std::string& name) {
  if (name == "full") return FeatureMode::full;
  if (name == "near_hover") return FeatureMode::near_hover;
  throw std::invalid_argument("unknown feature mode '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size <= 0 || epochs <= 0 || !(beta1 > 0.0 && beta1 < 1.0) ||
      !(beta2 > 0.0 && beta2 < 1.0) || !(epsilon > 0.0) || !(spectral_cap > 0.0) || power_iterations <= 0 ||
      hidden_width <= 0) {
    throw std::invalid_argument("TrainConfig: hyperparameters must be positive (betas in (0, 1))");
  }
  for (int w : deep_hidden) {
    if (w <= 0) throw std::invalid_argument("TrainConfig: deep_hidden widths must be positive");
  }
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
           {"epochs", c.epochs},               {"seed", c.seed},
           {"beta1", c.beta1},                 {"beta2", c.beta2},
           {"epsilon", c.epsilon},             {"spectral_cap", c.spectral_cap},
           {"power_iterations", c.power_iterations}, {"hidden_width", c.hidden_width},
           {"deep_hidden", c.deep_hidden}};
}

void from_json(const json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.spectral_cap = j.value("spectral_cap", c.spectral_cap);
  c.power_iterations = j.value("power_iterations", c.power_iterations);
  c.hidden_width = j.value("hidden_width", c.hidden_width);
  c.deep_hidden = j.value("deep_hidden", c.deep_hidden);
  c.validate();
}

Standardizer Standardizer::identity(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& samples) {
  if (samples.cols() == 0) throw std::invalid_argument("Standardizer::fit: no samples");
  Standardizer s;
  s.mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - s.mean;
  s.scale = (centered.array().square().rowwise().sum() / static_cast<double>(samples.cols())).sqrt();
  // Constant features (e.g. leader velocity at hover) pass through unscaled.
  for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
    if (!(s.scale(i) > 1e-12)) s.scale(i) = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& samples) const {
  return (samples.colwise() - mean).array().colwise() / scale.array();
}

PreparedBatch PreparedBatch::subset(std::span<const Eigen::Index> columns) const {
  PreparedBatch out;
  const auto n = static_cast<Eigen::Index>(columns.size());
  out.features.resize(features.rows(), n);
  out.lift.resize(2, lift.cols() > 0 ? n : 0);
  out.labels.resize(3, labels.cols() > 0 ? n : 0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index c = columns[static_cast<std::size_t>(k)];
    out.features.col(k) = features.col(c);
    if (lift.cols() > 0) out.lift.col(k) = lift.col(c);
    if (labels.cols() > 0) out.labels.col(k) = labels.col(c);
    if (!frames.empty()) out.frames.push_back(frames[static_cast<std::size_t>(c)]);
  }
  return out;
}

ForceModel::ForceModel(ModelKind kind, FeatureMode mode, Mlp net) : kind_(kind), mode_(mode), net_(std::move(net)) {
  const int out_dim = kind_ == ModelKind::equivariant ? 2 : 3;
  if (net_.input_dim() != input_dim() || net_.output_dim() != out_dim) {
    throw std::invalid_argument("ForceModel: network shape does not match model kind " + to_string(kind_));
  }
  standardizer_ = Standardizer::identity(input_dim());
}

void ForceModel::set_standardizer(Standardizer s) {
  if (s.mean.size() != input_dim() || s.scale.size() != input_dim()) {
    throw std::invalid_argument("ForceModel: standardizer dimension mismatch");
  }
  standardizer_ = std::move(s);
}

int ForceModel::input_dim() const { return kind_ == ModelKind::equivariant ? geometry::feature_count(mode_) : 6; }

Eigen::VectorXd ForceModel::raw_features(const InteractionState& x, const Mat3& r_ma) const {
  if (kind_ == ModelKind::equivariant) return geometry::feature_map(x, r_ma, mode_).as_vector();
  Eigen::VectorXd out(6);
  out << x.delta_p, x.v_follower;
  return out;
}

void ForceModel::fit_standardizer(const Dataset& data) {
  Eigen::MatrixXd raw(input_dim(), static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    raw.col(static_cast<Eigen::Index>(i)) = raw_features(data.rows[i].x, Mat3::Identity());
  }
  standardizer_ = Standardizer::fit(raw);
}

PreparedBatch ForceModel::prepare(std::span<const InteractionState> xs, std::span<const Vec3> labels,
                                  std::span<const Mat3> frames) const {
  if (!labels.empty() && labels.size() != xs.size()) throw std::invalid_argument("prepare: label count mismatch");
  if (!frames.empty() && frames.size() != xs.size()) throw std::invalid_argument("prepare: frame count mismatch");
  const auto n = static_cast<Eigen::Index>(xs.size());
  PreparedBatch b;
  Eigen::MatrixXd raw(input_dim(), n);
  if (kind_ == ModelKind::equivariant) b.lift.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Mat3 r = frames.empty() ? Mat3::Identity() : frames[idx];
    raw.col(i) = raw_features(xs[idx], r);
    if (kind_ == ModelKind::equivariant) {
      const double phi = geometry::polar_angle(xs[idx], r);
      b.lift(0, i) = std::cos(phi);
      b.lift(1, i) = std::sin(phi);
    }
  }
  b.features = standardizer_.apply(raw);
  b.frames.assign(frames.begin(), frames.end());
  b.labels.resize(3, labels.empty() ? 0 : n);
  for (Eigen::Index i = 0; i < b.labels.cols(); ++i) b.labels.col(i) = labels[static_cast<std::size_t>(i)];
  return b;
}

PreparedBatch ForceModel::prepare(const Dataset& data) const {
  const auto xs = data.inputs();
  const auto ys = data.labels();
  return prepare(xs, ys);
}

Eigen::Matrix3Xd ForceModel::output_map(const Eigen::MatrixXd& net_out, const PreparedBatch& batch) const {
  if (kind_ != ModelKind::equivariant) return net_out;
  Eigen::Matrix3Xd f(3, net_out.cols());
  for (Eigen::Index i = 0; i < net_out.cols(); ++i) {
    const Vec3 leader_frame(net_out(0, i) * batch.lift(0, i), net_out(0, i) * batch.lift(1, i), net_out(1, i));
    f.col(i) = batch.frames.empty() ? leader_frame
                                    : Vec3(batch.frames[static_cast<std::size_t>(i)].transpose() * leader_frame);
  }
  return f;
}

Eigen::MatrixXd ForceModel::output_map_adjoint(const Eigen::Matrix3Xd& d_force, const PreparedBatch& batch) const {
  if (kind_ != ModelKind::equivariant) return d_force;
  Eigen::MatrixXd d_out(2, d_force.cols());
  for (Eigen::Index i = 0; i < d_force.cols(); ++i) {
    const Vec3 e = batch.frames.empty() ? Vec3(d_force.col(i))
                                        : Vec3(batch.frames[static_cast<std::size_t>(i)] * d_force.col(i));
    d_out(0, i) = e.x() * batch.lift(0, i) + e.y() * batch.lift(1, i);
    d_out(1, i) = e.z();
  }
  return d_out;
}

Eigen::Matrix3Xd ForceModel::predict_prepared(const PreparedBatch& batch) const {
  return output_map(net_.forward_batch(batch.features), batch);
}

Vec3 ForceModel::predict(const InteractionState& x, const Mat3& r_ma) const {
  const std::array<InteractionState, 1> xs{x};
  const std::array<Mat3, 1> frames{r_ma};
  return predict_prepared(prepare(xs, {}, frames)).col(0);
}

Eigen::Matrix3Xd ForceModel::predict_batch(std::span<const InteractionState> xs) const {
  return predict_prepared(prepare(xs, {}));
}

double ForceModel::loss_and_gradient(const PreparedBatch& batch, Eigen::VectorXd* grad) const {
  if (batch.labels.cols() != batch.size() || batch.size() == 0) {
    throw std::invalid_argument("loss_and_gradient: batch needs one label per sample");
  }
  ForwardTape tape;
  const Eigen::MatrixXd net_out = net_.forward_batch(batch.features, tape);
  const Eigen::Matrix3Xd err = output_map(net_out, batch) - batch.labels;
  const double denom = 3.0 * static_cast<double>(batch.size());
  const double loss = err.squaredNorm() / denom;
  if (grad) {
    const Eigen::Matrix3Xd d_force = (2.0 / denom) * err;
    *grad = Mlp::flatten(net_.backward(tape, output_map_adjoint(d_force, batch)));
  }
  return loss;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  }
  return v;
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json ForceModel::to_json() const {
  json layers = json::array();
  for (const auto& layer : net_.layers()) {
    layers.push_back({{"rows", layer.weight.rows()},
                      {"cols", layer.weight.cols()},
                      {"weight", matrix_to_json(layer.weight)},
                      {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}});
  }
  json j{{"format", kModelFormat},
         {"kind", to_string(kind_)},
         {"mode", to_string(mode_)},
         {"layers", layers},
         {"standardization",
          {{"mean", std::vector<double>(standardizer_.mean.data(), standardizer_.mean.data() + standardizer_.mean.size())},
           {"scale",
            std::vector<double>(standardizer_.scale.data(), standardizer_.scale.data() + standardizer_.scale.size())}}},
         {"parameter_count", parameter_count()}};
  if (train_config_) j["train_config"] = *train_config_;
  return j;
}

ForceModel ForceModel::from_json(const json& j) {
  if (j.value("format", std::string{}) != kModelFormat) {
    throw std::runtime_error("model artifact: unsupported format tag (expected " + std::string(kModelFormat) + ")");
  }
  std::vector<DenseLayer> layers;
  for (const auto& lj : j.at("layers")) {
    const auto rows = lj.at("rows").get<Eigen::Index>();
    const auto cols = lj.at("cols").get<Eigen::Index>();
    const auto w = lj.at("weight").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols) throw std::runtime_error("model artifact: weight size");
    DenseLayer layer;
    layer.weight = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), rows, cols);
    layer.bias = vector_from_json(lj.at("bias"));
    layers.push_back(std::move(layer));
  }
  ForceModel m(model_kind_from_string(j.at("kind").get<std::string>()),
               feature_mode_from_string(j.at("mode").get<std::string>()), Mlp(std::move(layers)));
  const auto& st = j.at("standardization");
  m.set_standardizer({vector_from_json(st.at("mean")), vector_from_json(st.at("scale"))});
  if (j.contains("train_config")) m.set_train_config(j.at("train_config").get<TrainConfig>());
  return m;
}

void ForceModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json().dump(2) << '\n';
}

ForceModel ForceModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return from_json(json::parse(in));
}

ForceModel make_equivariant_model(FeatureMode mode, std::uint64_t seed, int hidden) {
  std::mt19937_64 rng(seed);
  const std::vector<int> widths{geometry::feature_count(mode), hidden, 2};
  return ForceModel(ModelKind::equivariant, mode, Mlp::random(widths, rng));
}

ForceModel make_shallow_baseline(std::uint64_t seed, int hidden) {
  std::mt19937_64 rng(seed);
  const std::vector<int> widths{6, hidden, 3};
  return ForceModel(ModelKind::shallow_nonequiv, FeatureMode::near_hover, Mlp::random(widths, rng));
}

ForceModel make_deep_baseline(std::uint64_t seed, std::span<const int> hidden) {
  std::mt19937_64 rng(seed);
  std::vector<int> widths{6};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(3);
  return ForceModel(ModelKind::deep_nonequiv, FeatureMode::near_hover, Mlp::random(widths, rng));
}

ForceModel make_model(ModelKind kind, FeatureMode mode, const TrainConfig& config) {
  switch (kind) {
    case ModelKind::equivariant: return make_equivariant_model(mode, config.seed, config.hidden_width);
    case ModelKind::shallow_nonequiv: return make_shallow_baseline(config.seed, config.hidden_width);
    case ModelKind::deep_nonequiv: return make_deep_baseline(config.seed, config.deep_hidden);
  }
  throw std::invalid_argument("make_model: unknown kind");
}

ForceModel zero_model(ModelKind kind, FeatureMode mode) {
  std::vector<int> widths;
  switch (kind) {
    case ModelKind::equivariant: widths = {geometry::feature_count(mode), 32, 2}; break;
    case ModelKind::shallow_nonequiv: widths = {6, 32, 3}; break;
    case ModelKind::deep_nonequiv: widths = {6, 32, 32, 32, 32, 32, 32, 3}; break;
  }
  return ForceModel(kind, kind == ModelKind::equivariant ? mode : FeatureMode::near_hover, Mlp::zeros(widths));
}

}  // namespace downwash::learning

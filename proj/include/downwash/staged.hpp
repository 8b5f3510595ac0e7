#pragma once

// Sequential staged data collection: each stage flies closer to the leader
// than the last, compensated by the model trained on all earlier stages.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "downwash/episode.hpp"
#include "downwash/training.hpp"

namespace downwash::pipeline {

struct StagePlan {
  /// Vertical separation band [min, max] in metres for stages 0, 1, 2.
  std::array<std::pair<double, double>, 3> separation_bands = {{{1.35, 1.75}, {0.8, 1.2}, {0.45, 0.6}}};
  double stage_duration = 340.0;     // flight seconds per stage
  double transect_fraction = 0.6;    // share of stage time spent on transects
  double transect_episode = 20.0;    // nominal transect episode length [s]
  double transect_speed_min = 0.25;
  double transect_speed_max = 1.0;
  double transect_offset = 0.5;      // |e1_fix| bound for transects [m]
  double transect_span = 1.5;
  bool randomize_heading = true;     // rotate each transect about the leader's vertical axis
  double lemniscate_period = 28.0;   // one lemniscate episode is one period
  double lemniscate_offset = 0.3;    // |center_n|, |center_e| bound [m]
  int record_stride = 5;             // keep every n-th control step as a dataset row
  double noise_sigma = 0.05;
  double dt = 0.02;
  int model_hold_steps = 1;
  Vec3 leader_position = Vec3(0.0, 0.0, -2.5);

  void validate() const;
  /// Total flight time over all stages, in minutes.
  double total_minutes() const { return 3.0 * stage_duration / 60.0; }
};

/// Independent RNG stream for (master seed, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Episodes one stage flies, in order; each paired with its duration.
std::vector<std::pair<Trajectory, double>> stage_episodes(int stage, const StagePlan& plan, std::uint64_t seed);

struct CollectSettings {
  dynamics::VehicleParams vehicle;
  control::LqrGains gains = control::design_lqr();
};

/// Flies one stage and returns its rows only (stage-local time). Stage 0 is
/// flown uncompensated; later stages require `predictor`.
learning::Dataset collect_stage(int stage, const std::optional<ForcePredictor>& predictor, const StagePlan& plan,
                                const field::FieldParams& field, std::uint64_t seed,
                                const CollectSettings& settings = {});

struct StagedResult {
  std::array<learning::ForceModel, 3> models;
  std::array<learning::Dataset, 3> training_sets;  // cumulative: stage i holds stages 0..i
  std::array<std::vector<double>, 3> loss_histories;
};

/// Alternates collect_stage and train. Stage i trains from scratch on the
/// concatenation of stages 0..i.
StagedResult sequential_train(const StagePlan& plan, const learning::TrainConfig& config,
                              const field::FieldParams& field, std::uint64_t seed,
                              learning::ModelKind kind = learning::ModelKind::equivariant,
                              geometry::FeatureMode mode = geometry::FeatureMode::near_hover,
                              const CollectSettings& settings = {});

/// Held-out data: the full cumulative dataset of an independent staged run
/// under `seed`, so it follows the same distribution as the training data.
learning::Dataset collect_validation(const StagePlan& plan, const learning::TrainConfig& config,
                                     const field::FieldParams& field, std::uint64_t seed,
                                     learning::ModelKind kind = learning::ModelKind::equivariant,
                                     geometry::FeatureMode mode = geometry::FeatureMode::near_hover,
                                     const CollectSettings& settings = {});

struct SweepCell {
  learning::ModelKind kind = learning::ModelKind::equivariant;
  double budget_minutes = 0.0;
  std::vector<double> rmse;  // one per seed, in seed order
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
};

struct SweepOptions {
  std::vector<double> budgets_minutes = {5.0, 10.0, 15.0};
  std::vector<learning::ModelKind> kinds = {learning::ModelKind::equivariant, learning::ModelKind::shallow_nonequiv,
                                            learning::ModelKind::deep_nonequiv};
  int n_seeds = 5;
  geometry::FeatureMode mode = geometry::FeatureMode::near_hover;
};

/// Truncates every stage of `full` proportionally to each budget, retrains
/// each kind from scratch per seed and scores it on `validation`.
std::vector<SweepCell> sample_efficiency_sweep(const learning::Dataset& full, double full_minutes,
                                               const learning::Dataset& validation,
                                               const learning::TrainConfig& config, const SweepOptions& options,
                                               std::uint64_t seed);

/// Median of a non-empty sample.
double median(std::vector<double> values);

}  // namespace downwash::pipeline

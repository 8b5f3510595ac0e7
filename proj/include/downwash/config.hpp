#pragma once

// Experiment configuration: one JSON document with sections vehicle, lqr,
// field, train, plan, trajectories and sweep. Missing keys take defaults;
// unknown keys are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "downwash/staged.hpp"

namespace downwash::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryConfig {
  TransectTrajectory transect;
  LemniscateTrajectory lemniscate;
  int transect_cycles = 2;
  double lemniscate_duration = 28.0;

  TrajectoryConfig();
  double transect_duration() const { return transect_cycles * transect.cycle_duration(); }
};

struct ExperimentConfig {
  dynamics::VehicleParams vehicle;
  control::CostWeights lqr;
  field::FieldParams field;
  learning::TrainConfig train;
  StagePlan plan;
  TrajectoryConfig trajectories;
  SweepOptions sweep;

  void validate() const;
  CollectSettings collect_settings() const;
  /// Episode settings for a single flight (duration still to be set).
  EpisodeSettings episode_settings(std::uint64_t seed) const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Throws ConfigError on malformed documents or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical serialisation, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace downwash::pipeline

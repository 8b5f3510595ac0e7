#include "downwash/staged.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace downwash::pipeline {

using learning::Dataset;
using learning::DatasetRow;

void StagePlan::validate() const {
  for (std::size_t s = 0; s < separation_bands.size(); ++s) {
    const auto [lo, hi] = separation_bands[s];
    if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("plan: separation band " + std::to_string(s) + " is invalid");
    if (s > 0 && !(hi <= separation_bands[s - 1].first)) {
      throw std::invalid_argument("plan: separation bands must decrease by stage");
    }
  }
  if (!(stage_duration > 0.0) || !(transect_episode > 0.0) || !(lemniscate_period > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("plan: durations must be positive");
  }
  if (!(transect_fraction >= 0.0 && transect_fraction <= 1.0)) {
    throw std::invalid_argument("plan: transect_fraction must lie in [0, 1]");
  }
  if (!(transect_speed_min > 0.0) || !(transect_speed_max >= transect_speed_min)) {
    throw std::invalid_argument("plan: transect speed range is invalid");
  }
  if (record_stride < 1 || model_hold_steps < 1) throw std::invalid_argument("plan: strides must be >= 1");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("plan: noise_sigma must be non-negative");
  if (!(transect_offset >= 0.0) || !(lemniscate_offset >= 0.0)) {
    throw std::invalid_argument("plan: offsets must be non-negative");
  }
  TransectTrajectory probe;
  probe.speed = transect_speed_max;
  probe.span = transect_span;
  probe.validate();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finaliser over a combination of both inputs
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::pair<Trajectory, double>> stage_episodes(int stage, const StagePlan& plan, std::uint64_t seed) {
  if (stage < 0 || stage > 2) throw std::invalid_argument("stage must be 0, 1 or 2");
  plan.validate();

  const double lem_time = (1.0 - plan.transect_fraction) * plan.stage_duration;
  const auto n_lem = static_cast<int>(std::lround(lem_time / plan.lemniscate_period));
  const double lem_total = std::min(plan.stage_duration, n_lem * plan.lemniscate_period);
  const double tr_time = plan.stage_duration - lem_total;
  const int n_tr = tr_time > 0.0 ? std::max(1, static_cast<int>(std::lround(tr_time / plan.transect_episode))) : 0;
  const double tr_duration = n_tr > 0 ? tr_time / n_tr : 0.0;
  const double lem_duration = n_lem > 0 ? lem_total / n_lem : 0.0;

  std::mt19937_64 rng(seed);
  const auto [sep_lo, sep_hi] = plan.separation_bands[static_cast<std::size_t>(stage)];
  std::uniform_real_distribution<double> separation(sep_lo, sep_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<std::pair<Trajectory, double>> episodes;
  const int total = n_lem + n_tr;
  int lem_done = 0;
  for (int i = 0; i < total; ++i) {
    // Spread the lemniscates evenly through the stage so that any prefix of
    // the stage keeps roughly the planned mix.
    const bool lemniscate = lem_done < static_cast<int>(std::lround(static_cast<double>(i + 1) * n_lem / total));
    const double depth = plan.leader_position.z() + separation(rng);
    if (lemniscate) {
      ++lem_done;
      LemniscateTrajectory lem;
      lem.center = Vec3(plan.leader_position.x() + between(-plan.lemniscate_offset, plan.lemniscate_offset),
                        plan.leader_position.y() + between(-plan.lemniscate_offset, plan.lemniscate_offset), depth);
      lem.period = plan.lemniscate_period;
      lem.phase = between(0.0, plan.lemniscate_period);
      episodes.emplace_back(lem, lem_duration);
    } else {
      TransectTrajectory tr;
      tr.e1_fix = between(-plan.transect_offset, plan.transect_offset);
      tr.origin = plan.leader_position.head<2>();
      if (plan.randomize_heading) tr.heading = between(0.0, geometry::kTwoPi);
      tr.depth = depth;
      tr.speed = between(plan.transect_speed_min, plan.transect_speed_max);
      tr.span = plan.transect_span;
      episodes.emplace_back(tr, tr_duration);
    }
  }
  return episodes;
}

Dataset collect_stage(int stage, const std::optional<ForcePredictor>& predictor, const StagePlan& plan,
                      const field::FieldParams& field, std::uint64_t seed, const CollectSettings& settings) {
  if (stage < 0 || stage > 2) throw std::invalid_argument("collect_stage: stage must be 0, 1 or 2");
  if (stage > 0 && !predictor) throw std::invalid_argument("collect_stage: stage >= 1 requires the previous model");

  const auto episodes = stage_episodes(stage, plan, seed);
  Dataset out;
  double t_offset = 0.0;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    EpisodeSettings es;
    es.duration = episodes[e].second;
    es.dt = plan.dt;
    es.noise_sigma = plan.noise_sigma;
    es.seed = derive_seed(seed, 1000 + e);
    es.model_hold_steps = plan.model_hold_steps;
    es.leader_position = plan.leader_position;
    es.vehicle = settings.vehicle;
    es.gains = settings.gains;
    const FlightLog log = run_episode(episodes[e].first, predictor, field, es);
    for (std::size_t k = 0; k < log.rows.size(); k += static_cast<std::size_t>(plan.record_stride)) {
      const auto& r = log.rows[k];
      DatasetRow row;
      row.t = t_offset + r.t;
      row.x = log.interaction(k);
      row.f_label = learning::compute_label(r.a_meas, r.u_fb.a, r.f_pred);
      row.stage = stage;
      out.rows.push_back(row);
    }
    t_offset += static_cast<double>(log.rows.size()) * log.dt;
  }
  return out;
}

StagedResult sequential_train(const StagePlan& plan, const learning::TrainConfig& config,
                              const field::FieldParams& field, std::uint64_t seed, learning::ModelKind kind,
                              geometry::FeatureMode mode, const CollectSettings& settings) {
  StagedResult result;
  Dataset cumulative;
  for (int s = 0; s < 3; ++s) {
    std::optional<ForcePredictor> predictor;
    if (s > 0) predictor = model_predictor(result.models[static_cast<std::size_t>(s - 1)]);
    cumulative.append(collect_stage(s, predictor, plan, field, derive_seed(seed, static_cast<std::uint64_t>(s)), settings));

    learning::TrainConfig cfg = config;
    cfg.seed = derive_seed(config.seed, 100 + static_cast<std::uint64_t>(s));
    auto trained = learning::train(learning::make_model(kind, mode, cfg), cumulative, cfg);
    const auto idx = static_cast<std::size_t>(s);
    result.models[idx] = std::move(trained.model);
    result.loss_histories[idx] = std::move(trained.loss_history);
    result.training_sets[idx] = cumulative;
  }
  return result;
}

Dataset collect_validation(const StagePlan& plan, const learning::TrainConfig& config, const field::FieldParams& field,
                           std::uint64_t seed, learning::ModelKind kind, geometry::FeatureMode mode,
                           const CollectSettings& settings) {
  return sequential_train(plan, config, field, seed, kind, mode, settings).training_sets[2];
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SweepCell> sample_efficiency_sweep(const Dataset& full, double full_minutes, const Dataset& validation,
                                               const learning::TrainConfig& config, const SweepOptions& options,
                                               std::uint64_t seed) {
  if (options.n_seeds < 1) throw std::invalid_argument("sweep: n_seeds must be >= 1");
  if (!(full_minutes > 0.0)) throw std::invalid_argument("sweep: full_minutes must be positive");
  if (validation.empty()) throw std::invalid_argument("sweep: empty validation set");
  for (double b : options.budgets_minutes) {
    if (!(b > 0.0) || b > full_minutes + 1e-9) {
      throw std::invalid_argument("sweep: budgets must lie in (0, " + std::to_string(full_minutes) + "] minutes");
    }
  }

  std::vector<SweepCell> cells;
  for (const auto kind : options.kinds) {
    for (double budget : options.budgets_minutes) {
      const Dataset subset = full.truncated(std::min(1.0, budget / full_minutes));
      SweepCell cell;
      cell.kind = kind;
      cell.budget_minutes = budget;
      for (int j = 0; j < options.n_seeds; ++j) {
        learning::TrainConfig cfg = config;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(j));
        const auto trained = learning::train(learning::make_model(kind, options.mode, cfg), subset, cfg);
        cell.rmse.push_back(learning::evaluate(trained.model, validation).rmse);
      }
      const double n = static_cast<double>(cell.rmse.size());
      cell.mean = std::accumulate(cell.rmse.begin(), cell.rmse.end(), 0.0) / n;
      double var = 0.0;
      for (double r : cell.rmse) var += (r - cell.mean) * (r - cell.mean);
      cell.stddev = cell.rmse.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      cell.median = median(cell.rmse);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace downwash::pipeline

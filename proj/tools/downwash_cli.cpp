// downwash: simulate, collect, train, evaluate and sweep the downwash models.
//
// Exit codes: 0 success, 1 other runtime failure, 2 invalid arguments,
// 3 configuration error, 4 numerical failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "downwash/config.hpp"
#include "downwash/field_grid.hpp"
#include "downwash/metrics.hpp"

#ifndef DOWNWASH_VERSION
#define DOWNWASH_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace downwash;
using namespace downwash::pipeline;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::string> argv;
};

struct Run {
  ExperimentConfig config;
  fs::path out;
  json outputs = json::array();

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

Run start(const Common& c) {
  Run r;
  r.config = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  r.config.validate();
  r.out = c.out_dir;
  fs::create_directories(r.out);
  return r;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setw(2) << j << '\n';
}

void finish(Run& r, const Common& c, const std::string& command, const json& args) {
  json manifest{{"tool", "downwash"},
                {"version", DOWNWASH_VERSION},
                {"command", command},
                {"arguments", args},
                {"argv", c.argv},
                {"seed", c.seed},
                {"config_hash", config_hash(r.config)},
                {"config", to_json(r.config)},
                {"outputs", r.outputs}};
  write_json(r.out / "manifest.json", manifest);
}

json summary_json(const ErrorSummary& s) {
  return {{"mean", s.mean}, {"max", s.max}, {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}};
}

json tracking_json(const TrackingMetrics& m) {
  return {{"position_lateral", summary_json(m.position_lateral)},
          {"position_vertical", summary_json(m.position_vertical)},
          {"position_3d", summary_json(m.position_3d)},
          {"velocity_lateral", summary_json(m.velocity_lateral)},
          {"velocity_vertical", summary_json(m.velocity_vertical)},
          {"velocity_3d", summary_json(m.velocity_3d)}};
}

json eval_json(const learning::EvalMetrics& m) {
  return {{"rmse", m.rmse},
          {"rmse_lateral", m.rmse_lateral},
          {"rmse_vertical", m.rmse_vertical},
          {"rmse_axis", {m.rmse_axis.x(), m.rmse_axis.y(), m.rmse_axis.z()}},
          {"samples", m.samples}};
}

Trajectory pick_trajectory(const ExperimentConfig& cfg, const std::string& name, double& duration) {
  if (name == "lemniscate") {
    duration = cfg.trajectories.lemniscate_duration;
    return cfg.trajectories.lemniscate;
  }
  if (name == "transect") {
    duration = cfg.trajectories.transect_duration();
    return cfg.trajectories.transect;
  }
  if (name == "hover") {
    duration = cfg.trajectories.lemniscate_duration;
    const auto& tr = cfg.trajectories.transect;
    return HoverTrajectory{Vec3(tr.origin.x(), tr.origin.y(), tr.depth)};
  }
  throw UsageError("unknown trajectory '" + name + "' (expected lemniscate, transect or hover)");
}

// --- subcommands ------------------------------------------------------------

struct SimulateArgs {
  std::string trajectory = "lemniscate";
  std::string compensation = "none";
  std::string model_path;
  bool no_field = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  Run r = start(c);
  double duration = 0.0;
  const Trajectory traj = pick_trajectory(r.config, a.trajectory, duration);
  std::optional<learning::ForceModel> model;
  std::optional<ForcePredictor> predictor;
  if (a.compensation == "model") {
    if (a.model_path.empty()) throw UsageError("--compensation model requires --model");
    model = learning::ForceModel::load(a.model_path);
    predictor = model_predictor(*model);
  } else if (a.compensation == "oracle") {
    predictor = oracle_predictor(r.config.field);
  } else if (a.compensation != "none") {
    throw UsageError("unknown compensation '" + a.compensation + "'");
  }
  std::optional<field::FieldParams> fld;
  if (!a.no_field) fld = r.config.field;

  EpisodeSettings es = r.config.episode_settings(c.seed);
  es.duration = duration;
  const FlightLog log = run_episode(traj, predictor, fld, es);
  write_flight_log_csv(log, r.file("flight_log.csv").string());
  const TrackingMetrics m = tracking_metrics(log);
  write_json(r.file("metrics.json"), tracking_json(m));
  std::cout << "simulate: " << log.rows.size() << " steps, mean 3D position error " << m.position_3d.mean << " m\n";
  finish(r, c, "simulate",
         {{"trajectory", a.trajectory}, {"compensation", a.compensation}, {"model", a.model_path}, {"no_field", a.no_field}});
  return 0;
}

struct CollectArgs {
  int stage = 0;
  std::string prev_model;
  std::string prev_data;
};

int cmd_collect(const Common& c, const CollectArgs& a) {
  Run r = start(c);
  if (a.stage < 0 || a.stage > 2) throw UsageError("--stage must be 0, 1 or 2");
  if (a.stage > 0 && a.prev_model.empty()) throw UsageError("stage >= 1 requires --prev-model");
  std::optional<learning::ForceModel> model;
  std::optional<ForcePredictor> predictor;
  if (!a.prev_model.empty()) {
    model = learning::ForceModel::load(a.prev_model);
    predictor = model_predictor(*model);
  }
  learning::Dataset data;
  if (!a.prev_data.empty()) data = learning::read_dataset_csv(a.prev_data);
  data.append(collect_stage(a.stage, predictor, r.config.plan, r.config.field, derive_seed(c.seed, static_cast<std::uint64_t>(a.stage)),
                            r.config.collect_settings()));
  write_dataset_csv(data, r.file("dataset.csv").string());
  std::cout << "collect: stage " << a.stage << ", " << data.size() << " rows in total\n";
  finish(r, c, "collect", {{"stage", a.stage}, {"prev_model", a.prev_model}, {"prev_data", a.prev_data}});
  return 0;
}

struct TrainArgs {
  std::string data_path;
  std::string kind = "equivariant";
  std::string mode = "near_hover";
};

int cmd_train(const Common& c, const TrainArgs& a) {
  Run r = start(c);
  learning::ModelKind kind{};
  geometry::FeatureMode mode{};
  try {
    kind = learning::model_kind_from_string(a.kind);
    mode = learning::feature_mode_from_string(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const learning::Dataset data = learning::read_dataset_csv(a.data_path);
  learning::TrainConfig cfg = r.config.train;
  cfg.seed = c.seed;
  const auto result = learning::train(learning::make_model(kind, mode, cfg), data, cfg);
  result.model.save(r.file("model.json").string());
  std::ofstream loss(r.file("loss.csv"));
  loss << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) loss << e << ',' << result.loss_history[e] << '\n';
  std::cout << "train: " << a.kind << ", " << result.model.parameter_count() << " parameters, final loss "
            << result.loss_history.back() << "\n";
  finish(r, c, "train", {{"data", a.data_path}, {"kind", a.kind}, {"mode", a.mode}});
  return 0;
}

struct EvalArgs {
  std::vector<std::string> model_paths;
  std::string data_path;
  bool closed_loop = true;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
  Run r = start(c);
  std::vector<learning::ForceModel> models;
  for (const auto& p : a.model_paths) models.push_back(learning::ForceModel::load(p));
  const learning::Dataset validation = a.data_path.empty()
                                           ? collect_validation(r.config.plan, r.config.train, r.config.field, c.seed,
                                                                learning::ModelKind::equivariant,
                                                                geometry::FeatureMode::near_hover, r.config.collect_settings())
                                           : learning::read_dataset_csv(a.data_path);

  EpisodeSettings es = r.config.episode_settings(c.seed);
  double transect_duration = 0.0, lemniscate_duration = 0.0;
  const Trajectory transect = pick_trajectory(r.config, "transect", transect_duration);
  const Trajectory lemniscate = pick_trajectory(r.config, "lemniscate", lemniscate_duration);
  const auto fly = [&](const Trajectory& t, double duration, const std::optional<ForcePredictor>& p) {
    es.duration = duration;
    return tracking_metrics(run_episode(t, p, r.config.field, es));
  };

  json table = json::array();
  std::ofstream csv(r.file("eval.csv"));
  csv << "model,kind,parameters,rmse,rmse_lateral,rmse_vertical,pos_lateral,pos_3d,vel_lateral,vel_3d\n"
      << std::setprecision(10);
  const auto row = [&](const std::string& name, const std::string& kind, std::size_t params,
                       const std::optional<learning::EvalMetrics>& em, const std::optional<TrackingMetrics>& tm) {
    json j{{"model", name}, {"kind", kind}, {"parameters", params}};
    csv << name << ',' << kind << ',' << params;
    if (em) {
      j["validation"] = eval_json(*em);
      csv << ',' << em->rmse << ',' << em->rmse_lateral << ',' << em->rmse_vertical;
    } else {
      csv << ",,,";
    }
    if (tm) {
      j["tracking"] = tracking_json(*tm);
      csv << ',' << tm->position_lateral.mean << ',' << tm->position_3d.mean << ',' << tm->velocity_lateral.mean << ','
          << tm->velocity_3d.mean;
    } else {
      csv << ",,,,";
    }
    csv << '\n';
    table.push_back(j);
  };

  // Tracking errors average the transect and lemniscate runs.
  const auto combined = [&](const std::optional<ForcePredictor>& p) {
    TrackingMetrics a1 = fly(transect, transect_duration, p);
    const TrackingMetrics a2 = fly(lemniscate, lemniscate_duration, p);
    const auto avg = [](ErrorSummary& x, const ErrorSummary& y) {
      x.mean = 0.5 * (x.mean + y.mean);
      x.max = std::max(x.max, y.max);
    };
    avg(a1.position_lateral, a2.position_lateral);
    avg(a1.position_vertical, a2.position_vertical);
    avg(a1.position_3d, a2.position_3d);
    avg(a1.velocity_lateral, a2.velocity_lateral);
    avg(a1.velocity_vertical, a2.velocity_vertical);
    avg(a1.velocity_3d, a2.velocity_3d);
    return a1;
  };

  if (a.closed_loop) row("uncompensated", "none", 0, std::nullopt, combined(std::nullopt));
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto em = learning::evaluate(models[i], validation);
    std::optional<TrackingMetrics> tm;
    if (a.closed_loop) tm = combined(model_predictor(models[i]));
    row(a.model_paths[i], learning::to_string(models[i].kind()), models[i].parameter_count(), em, tm);
    std::cout << a.model_paths[i] << ": validation RMSE " << em.rmse << " (lateral " << em.rmse_lateral << ", vertical "
              << em.rmse_vertical << ")\n";
  }
  write_json(r.file("eval.json"), {{"validation_samples", validation.size()}, {"table", table}});
  finish(r, c, "eval", {{"models", a.model_paths}, {"data", a.data_path}, {"closed_loop", a.closed_loop}});
  return 0;
}

int cmd_sweep(const Common& c) {
  Run r = start(c);
  const auto& cfg = r.config;
  const auto settings = cfg.collect_settings();
  const StagedResult staged = sequential_train(cfg.plan, cfg.train, cfg.field, derive_seed(c.seed, 1),
                                               learning::ModelKind::equivariant, cfg.sweep.mode, settings);
  const learning::Dataset validation = collect_validation(cfg.plan, cfg.train, cfg.field, derive_seed(c.seed, 2),
                                                          learning::ModelKind::equivariant, cfg.sweep.mode, settings);
  const auto cells = sample_efficiency_sweep(staged.training_sets[2], cfg.plan.total_minutes(), validation, cfg.train,
                                             cfg.sweep, derive_seed(c.seed, 3));
  std::ofstream csv(r.file("sweep.csv"));
  csv << "kind,budget_minutes,mean,std,median,rmse_per_seed\n" << std::setprecision(10);
  json cells_json = json::array();
  for (const auto& cell : cells) {
    csv << learning::to_string(cell.kind) << ',' << cell.budget_minutes << ',' << cell.mean << ',' << cell.stddev << ','
        << cell.median << ',';
    for (std::size_t i = 0; i < cell.rmse.size(); ++i) csv << (i ? ";" : "") << cell.rmse[i];
    csv << '\n';
    cells_json.push_back({{"kind", learning::to_string(cell.kind)},
                          {"budget_minutes", cell.budget_minutes},
                          {"mean", cell.mean},
                          {"std", cell.stddev},
                          {"median", cell.median},
                          {"rmse", cell.rmse}});
    std::cout << learning::to_string(cell.kind) << " @ " << cell.budget_minutes << " min: " << cell.mean << " +/- "
              << cell.stddev << "\n";
  }
  write_json(r.file("sweep.json"), {{"validation_samples", validation.size()}, {"cells", cells_json}});
  finish(r, c, "sweep", json::object());
  return 0;
}

struct ExportArgs {
  std::string model_path;
  std::string plane = "top_down";
  double offset = 0.6;
  double extent = 1.5;
  int count = 61;
  std::vector<double> v_probe = {0.5, 0.0, 0.0};
};

int cmd_export(const Common& c, const ExportArgs& a) {
  Run r = start(c);
  if (a.v_probe.size() != 3) throw UsageError("--v-probe takes three values");
  const GridPlane plane = [&] {
    try {
      return grid_plane_from_string(a.plane);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  GridSpec spec;
  spec.u_min = spec.w_min = -a.extent;
  spec.u_max = spec.w_max = a.extent;
  spec.u_count = spec.w_count = a.count;
  spec.offset = a.offset;
  if (plane == GridPlane::sagittal) {
    // Sagittal rows run from just below the leader downwards.
    spec.w_min = 0.0;
    spec.w_max = 2.0 * a.extent;
  }
  const Vec3 v(a.v_probe[0], a.v_probe[1], a.v_probe[2]);
  const FieldGrid grid = a.model_path.empty()
                             ? export_field_grid(oracle_predictor(r.config.field), plane, spec, v)
                             : export_field_grid(learning::ForceModel::load(a.model_path), plane, spec, v);
  write_field_grid_csv(grid, r.file("field_" + to_string(plane) + ".csv").string());
  std::cout << "export-field: " << grid.samples.size() << " samples\n";
  finish(r, c, "export-field",
         {{"model", a.model_path.empty() ? "oracle" : a.model_path}, {"plane", a.plane}, {"offset", a.offset},
          {"extent", a.extent}, {"count", a.count}, {"v_probe", a.v_probe}});
  return 0;
}

int cmd_pipeline(const Common& c) {
  Run r = start(c);
  const auto& cfg = r.config;
  const auto settings = cfg.collect_settings();
  const StagedResult staged = sequential_train(cfg.plan, cfg.train, cfg.field, derive_seed(c.seed, 1),
                                               learning::ModelKind::equivariant, cfg.sweep.mode, settings);
  const learning::Dataset validation = collect_validation(cfg.plan, cfg.train, cfg.field, derive_seed(c.seed, 2),
                                                          learning::ModelKind::equivariant, cfg.sweep.mode, settings);
  const learning::Dataset validation_stage2 = validation.stage_rows(2);
  json stages = json::array();
  for (int s = 0; s < 3; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const std::string tag = std::to_string(s);
    write_dataset_csv(staged.training_sets[i].stage_rows(s), r.file("stage" + tag + ".csv").string());
    staged.models[i].save(r.file("M" + tag + ".json").string());
    const auto em = learning::evaluate(staged.models[i], validation);
    const auto em2 = learning::evaluate(staged.models[i], validation_stage2);
    stages.push_back({{"stage", s},
                      {"training_rows", staged.training_sets[i].size()},
                      {"final_loss", staged.loss_histories[i].back()},
                      {"validation", eval_json(em)},
                      {"validation_stage2", eval_json(em2)}});
    std::cout << "M" << s << ": " << staged.training_sets[i].size() << " rows, validation RMSE " << em.rmse
              << ", stage-2 RMSE " << em2.rmse << "\n";
  }
  write_dataset_csv(staged.training_sets[2], r.file("dataset.csv").string());
  write_dataset_csv(validation, r.file("validation.csv").string());
  write_json(r.file("pipeline.json"), {{"stages", stages}, {"validation_samples", validation.size()}});
  finish(r, c, "pipeline", json::object());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant multirotor downwash modelling: simulation, staged data collection, training and evaluation"};
  app.set_version_flag("--version", DOWNWASH_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Common common;
  for (int i = 0; i < argc; ++i) common.argv.emplace_back(argv[i]);
  app.add_option("--config", common.config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--out", common.out_dir, "Output directory");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Fly one closed-loop episode and log it");
  simulate->add_option("--trajectory", sim.trajectory, "lemniscate | transect | hover");
  simulate->add_option("--compensation", sim.compensation, "none | model | oracle");
  simulate->add_option("--model", sim.model_path, "Model artifact for --compensation model")->check(CLI::ExistingFile);
  simulate->add_flag("--no-field", sim.no_field, "Disable the downwash field");

  CollectArgs col;
  auto* collect = app.add_subcommand("collect", "Collect one stage of training data");
  collect->add_option("--stage", col.stage, "Stage 0, 1 or 2")->required();
  collect->add_option("--prev-model", col.prev_model, "Model compensating this stage")->check(CLI::ExistingFile);
  collect->add_option("--prev-data", col.prev_data, "Earlier stages' dataset to extend")->check(CLI::ExistingFile);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a model on a dataset CSV");
  train->add_option("--data", tr.data_path, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--kind", tr.kind, "equivariant | shallow_nonequiv | deep_nonequiv");
  train->add_option("--mode", tr.mode, "near_hover | full (equivariant features)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Validation RMSE and closed-loop tracking for model artifacts");
  eval->add_option("--model", ev.model_paths, "Model artifact(s)")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev.data_path, "Validation dataset CSV (default: collect one)")->check(CLI::ExistingFile);
  eval->add_flag("!--no-closed-loop", ev.closed_loop, "Skip the tracking flights");

  auto* sweep = app.add_subcommand("sweep", "Sample-efficiency sweep over budgets, model kinds and seeds");

  ExportArgs ex;
  auto* export_field = app.add_subcommand("export-field", "Evaluate a model (or the oracle) on a planar grid");
  export_field->add_option("--model", ex.model_path, "Model artifact (default: oracle field)")->check(CLI::ExistingFile);
  export_field->add_option("--plane", ex.plane, "top_down | sagittal");
  export_field->add_option("--offset", ex.offset, "Distance of the plane from the leader [m]");
  export_field->add_option("--extent", ex.extent, "Half-width of the grid [m]");
  export_field->add_option("--count", ex.count, "Nodes per axis")->check(CLI::PositiveNumber);
  export_field->add_option("--v-probe", ex.v_probe, "Follower velocity n e d")->expected(3);

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Full staged collection and training (M0, M1, M2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(common, sim);
    if (*collect) return cmd_collect(common, col);
    if (*train) return cmd_train(common, tr);
    if (*eval) return cmd_eval(common, ev);
    if (*sweep) return cmd_sweep(common);
    if (*export_field) return cmd_export(common, ex);
    if (*pipeline_cmd) return cmd_pipeline(common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "downwash/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace downwash::pipeline {

using nlohmann::json;

TrajectoryConfig::TrajectoryConfig() {
  lemniscate.center = Vec3(0.0, 0.0, -1.9);
  // Start at the far tip so the under-leader crossings fall at T/4 and 3T/4.
  lemniscate.phase = 0.75 * lemniscate.period;
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

template <int N>
json diag_json(const Eigen::Matrix<double, N, 1>& d) {
  return std::vector<double>(d.data(), d.data() + N);
}

template <int N>
Eigen::Matrix<double, N, 1> diag_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != static_cast<std::size_t>(N)) throw ConfigError("expected " + std::to_string(N) + " weights");
  return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
}

void require_known(const json& section, const std::string& name, const std::set<std::string>& keys) {
  if (!section.is_object()) throw ConfigError("section '" + name + "' must be an object");
  for (const auto& item : section.items()) {
    if (!keys.count(item.key())) throw ConfigError("unknown key '" + name + "." + item.key() + "'");
  }
}

const json& section(const json& root, const std::string& name) {
  static const json empty = json::object();
  return root.contains(name) ? root.at(name) : empty;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(vehicle.mass > 0.0) || !(vehicle.g > 0.0) || !(vehicle.a_max > 0.0)) {
    throw ConfigError("vehicle: mass, g and a_max must be positive");
  }
  if ((lqr.q_diag.array() < 0.0).any() || (lqr.r_diag.array() <= 0.0).any()) {
    throw ConfigError("lqr: Q must be non-negative and R positive");
  }
  try {
    field.validate();
    train.validate();
    plan.validate();
    trajectories.transect.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(trajectories.lemniscate.period > 0.0) || !(trajectories.lemniscate_duration > 0.0) ||
      trajectories.transect_cycles < 1) {
    throw ConfigError("trajectories: period, duration and cycles must be positive");
  }
  if (sweep.n_seeds < 1 || sweep.kinds.empty() || sweep.budgets_minutes.empty()) {
    throw ConfigError("sweep: needs at least one seed, kind and budget");
  }
  for (double b : sweep.budgets_minutes) {
    if (!(b > 0.0) || b > plan.total_minutes() + 1e-9) throw ConfigError("sweep: budgets must lie within the plan's flight time");
  }
}

CollectSettings ExperimentConfig::collect_settings() const { return {vehicle, control::design_lqr(lqr)}; }

EpisodeSettings ExperimentConfig::episode_settings(std::uint64_t seed) const {
  EpisodeSettings es;
  es.dt = plan.dt;
  es.noise_sigma = plan.noise_sigma;
  es.seed = seed;
  es.model_hold_steps = plan.model_hold_steps;
  es.leader_position = plan.leader_position;
  es.vehicle = vehicle;
  es.gains = control::design_lqr(lqr);
  return es;
}

json to_json(const ExperimentConfig& c) {
  json bands = json::array();
  for (const auto& [lo, hi] : c.plan.separation_bands) bands.push_back({lo, hi});
  json kinds = json::array();
  for (auto k : c.sweep.kinds) kinds.push_back(learning::to_string(k));
  const auto& tr = c.trajectories.transect;
  const auto& lem = c.trajectories.lemniscate;
  json train;
  learning::to_json(train, c.train);
  return json{
      {"vehicle", {{"mass", c.vehicle.mass}, {"g", c.vehicle.g}, {"a_max", c.vehicle.a_max}, {"body_span", c.vehicle.body_span}}},
      {"lqr", {{"q_diag", diag_json<7>(c.lqr.q_diag)}, {"r_diag", diag_json<4>(c.lqr.r_diag)}}},
      {"field",
       {{"a_down", c.field.a_down},
        {"a_lift", c.field.a_lift},
        {"a_rad", c.field.a_rad},
        {"sigma_r", c.field.sigma_r},
        {"z_near", c.field.z_near},
        {"z_far", c.field.z_far},
        {"eps_sym", c.field.eps_sym},
        {"leader_speed_gain", c.field.leader_speed_gain}}},
      {"train", train},
      {"plan",
       {{"separation_bands", bands},
        {"stage_duration", c.plan.stage_duration},
        {"transect_fraction", c.plan.transect_fraction},
        {"transect_episode", c.plan.transect_episode},
        {"transect_speed_min", c.plan.transect_speed_min},
        {"transect_speed_max", c.plan.transect_speed_max},
        {"transect_offset", c.plan.transect_offset},
        {"transect_span", c.plan.transect_span},
        {"randomize_heading", c.plan.randomize_heading},
        {"lemniscate_period", c.plan.lemniscate_period},
        {"lemniscate_offset", c.plan.lemniscate_offset},
        {"record_stride", c.plan.record_stride},
        {"noise_sigma", c.plan.noise_sigma},
        {"dt", c.plan.dt},
        {"model_hold_steps", c.plan.model_hold_steps},
        {"leader_position", vec_json(c.plan.leader_position)}}},
      {"trajectories",
       {{"transect",
         {{"e1_fix", tr.e1_fix},
          {"heading", tr.heading},
          {"origin", {tr.origin.x(), tr.origin.y()}},
          {"depth", tr.depth},
          {"speed", tr.speed},
          {"span", tr.span},
          {"turn_time", tr.turn_time}}},
        {"lemniscate", {{"center", vec_json(lem.center)}, {"a", lem.a}, {"b", lem.b}, {"period", lem.period}, {"phase", lem.phase}}},
        {"transect_cycles", c.trajectories.transect_cycles},
        {"lemniscate_duration", c.trajectories.lemniscate_duration}}},
      {"sweep",
       {{"budgets_minutes", c.sweep.budgets_minutes},
        {"kinds", kinds},
        {"n_seeds", c.sweep.n_seeds},
        {"mode", learning::to_string(c.sweep.mode)}}}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    require_known(j, "<root>", {"vehicle", "lqr", "field", "train", "plan", "trajectories", "sweep"});

    const json& v = section(j, "vehicle");
    require_known(v, "vehicle", {"mass", "g", "a_max", "body_span"});
    c.vehicle.mass = v.value("mass", c.vehicle.mass);
    c.vehicle.g = v.value("g", c.vehicle.g);
    c.vehicle.a_max = v.value("a_max", c.vehicle.a_max);
    c.vehicle.body_span = v.value("body_span", c.vehicle.body_span);

    const json& q = section(j, "lqr");
    require_known(q, "lqr", {"q_diag", "r_diag"});
    if (q.contains("q_diag")) c.lqr.q_diag = diag_from<7>(q.at("q_diag"));
    if (q.contains("r_diag")) c.lqr.r_diag = diag_from<4>(q.at("r_diag"));

    const json& f = section(j, "field");
    require_known(f, "field", {"a_down", "a_lift", "a_rad", "sigma_r", "z_near", "z_far", "eps_sym", "leader_speed_gain"});
    c.field.a_down = f.value("a_down", c.field.a_down);
    c.field.a_lift = f.value("a_lift", c.field.a_lift);
    c.field.a_rad = f.value("a_rad", c.field.a_rad);
    c.field.sigma_r = f.value("sigma_r", c.field.sigma_r);
    c.field.z_near = f.value("z_near", c.field.z_near);
    c.field.z_far = f.value("z_far", c.field.z_far);
    c.field.eps_sym = f.value("eps_sym", c.field.eps_sym);
    c.field.leader_speed_gain = f.value("leader_speed_gain", c.field.leader_speed_gain);

    const json& t = section(j, "train");
    require_known(t, "train", {"learning_rate", "batch_size", "epochs", "seed", "beta1", "beta2", "epsilon", "spectral_cap",
                               "power_iterations", "hidden_width", "deep_hidden"});
    learning::from_json(t, c.train);

    const json& p = section(j, "plan");
    require_known(p, "plan", {"separation_bands", "stage_duration", "transect_fraction", "transect_episode",
                              "transect_speed_min", "transect_speed_max", "transect_offset", "transect_span", "randomize_heading",
                              "lemniscate_period", "lemniscate_offset", "record_stride", "noise_sigma", "dt",
                              "model_hold_steps", "leader_position"});
    if (p.contains("separation_bands")) {
      const auto bands = p.at("separation_bands").get<std::vector<std::vector<double>>>();
      if (bands.size() != 3) throw ConfigError("plan.separation_bands needs three [min, max] pairs");
      for (std::size_t s = 0; s < 3; ++s) {
        if (bands[s].size() != 2) throw ConfigError("plan.separation_bands entries are [min, max]");
        c.plan.separation_bands[s] = {bands[s][0], bands[s][1]};
      }
    }
    c.plan.stage_duration = p.value("stage_duration", c.plan.stage_duration);
    c.plan.transect_fraction = p.value("transect_fraction", c.plan.transect_fraction);
    c.plan.transect_episode = p.value("transect_episode", c.plan.transect_episode);
    c.plan.transect_speed_min = p.value("transect_speed_min", c.plan.transect_speed_min);
    c.plan.transect_speed_max = p.value("transect_speed_max", c.plan.transect_speed_max);
    c.plan.transect_offset = p.value("transect_offset", c.plan.transect_offset);
    c.plan.transect_span = p.value("transect_span", c.plan.transect_span);
    c.plan.randomize_heading = p.value("randomize_heading", c.plan.randomize_heading);
    c.plan.lemniscate_period = p.value("lemniscate_period", c.plan.lemniscate_period);
    c.plan.lemniscate_offset = p.value("lemniscate_offset", c.plan.lemniscate_offset);
    c.plan.record_stride = p.value("record_stride", c.plan.record_stride);
    c.plan.noise_sigma = p.value("noise_sigma", c.plan.noise_sigma);
    c.plan.dt = p.value("dt", c.plan.dt);
    c.plan.model_hold_steps = p.value("model_hold_steps", c.plan.model_hold_steps);
    if (p.contains("leader_position")) c.plan.leader_position = vec_from(p.at("leader_position"));

    const json& tj = section(j, "trajectories");
    require_known(tj, "trajectories", {"transect", "lemniscate", "transect_cycles", "lemniscate_duration"});
    const json& tr = section(tj, "transect");
    require_known(tr, "trajectories.transect", {"e1_fix", "heading", "origin", "depth", "speed", "span", "turn_time"});
    auto& ct = c.trajectories.transect;
    ct.e1_fix = tr.value("e1_fix", ct.e1_fix);
    ct.heading = tr.value("heading", ct.heading);
    if (tr.contains("origin")) {
      const auto o = tr.at("origin").get<std::vector<double>>();
      if (o.size() != 2) throw ConfigError("trajectories.transect.origin is [n, e]");
      ct.origin = Eigen::Vector2d(o[0], o[1]);
    }
    ct.depth = tr.value("depth", ct.depth);
    ct.speed = tr.value("speed", ct.speed);
    ct.span = tr.value("span", ct.span);
    ct.turn_time = tr.value("turn_time", ct.turn_time);
    const json& lem = section(tj, "lemniscate");
    require_known(lem, "trajectories.lemniscate", {"center", "a", "b", "period", "phase"});
    auto& cl = c.trajectories.lemniscate;
    if (lem.contains("center")) cl.center = vec_from(lem.at("center"));
    cl.a = lem.value("a", cl.a);
    cl.b = lem.value("b", cl.b);
    const bool period_given = lem.contains("period");
    cl.period = lem.value("period", cl.period);
    cl.phase = lem.value("phase", period_given ? 0.75 * cl.period : cl.phase);
    c.trajectories.transect_cycles = tj.value("transect_cycles", c.trajectories.transect_cycles);
    c.trajectories.lemniscate_duration = tj.value("lemniscate_duration", c.trajectories.lemniscate_duration);

    const json& sw = section(j, "sweep");
    require_known(sw, "sweep", {"budgets_minutes", "kinds", "n_seeds", "mode"});
    c.sweep.budgets_minutes = sw.value("budgets_minutes", c.sweep.budgets_minutes);
    if (sw.contains("kinds")) {
      c.sweep.kinds.clear();
      for (const auto& k : sw.at("kinds")) c.sweep.kinds.push_back(learning::model_kind_from_string(k.get<std::string>()));
    }
    c.sweep.n_seeds = sw.value("n_seeds", c.sweep.n_seeds);
    if (sw.contains("mode")) c.sweep.mode = learning::feature_mode_from_string(sw.at("mode").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace downwash::pipeline

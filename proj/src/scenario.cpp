#include "etcl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "etcl/errors.hpp"

namespace etcl {

using nlohmann::json;

double ControlSpec::at(double t) const {
  if (type == Type::Constant) return value;
  return amplitude * std::sin(frequency * t + phase);
}

Topology ScenarioConfig::make_topology_checked() const {
  try {
    if (topology == TopologyKind::Custom) {
      return make_custom_topology(robots, custom_edges);
    }
    return make_topology(topology, robots);
  } catch (const BadSize& e) {
    throw ConfigError("topology", e.what());
  }
}

Eigen::VectorXd ScenarioConfig::alpha_for(int agent) const {
  if (alpha.empty()) return Eigen::VectorXd::Ones(layout().total());
  return alpha.at(agent);
}

void ScenarioConfig::validate() const {
  const int d = layout().state_dim;
  if (robots < 2) throw ConfigError("topology.robots", "need at least 2 robots");
  if (steps < 0) throw ConfigError("dynamics.steps", "must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("dynamics.dt", "must be > 0");
  if (process_noise_diag.size() != d) {
    throw ConfigError("dynamics.process_noise_diag",
                      "expected " + std::to_string(d) + " entries");
  }
  for (int c = 0; c < d; ++c) {
    if (!(process_noise_diag[c] > 0.0)) {
      throw ConfigError("dynamics.process_noise_diag", "entries must be > 0");
    }
  }
  if (dynamics == DynamicsKind::Dubins &&
      static_cast<int>(speeds.size()) != robots) {
    throw ConfigError("dynamics.speeds", "expected one speed per robot");
  }
  if (static_cast<int>(controls.size()) != robots) {
    throw ConfigError("controls", "expected one control schedule per robot");
  }
  if (dynamics == DynamicsKind::Linear1d) {
    if (!(sensors.self_var > 0.0))
      throw ConfigError("sensors.self_var", "must be > 0");
    if (!(sensors.relative_var > 0.0))
      throw ConfigError("sensors.relative_var", "must be > 0");
  } else {
    if (!(sensors.gps_pos_var > 0.0))
      throw ConfigError("sensors.gps_pos_var", "must be > 0");
    if (!(sensors.gps_theta_var > 0.0))
      throw ConfigError("sensors.gps_theta_var", "must be > 0");
    if (!(sensors.range_var > 0.0))
      throw ConfigError("sensors.range_var", "must be > 0");
    if (!(sensors.bearing_var > 0.0))
      throw ConfigError("sensors.bearing_var", "must be > 0");
    for (int r : sensors.gps_robots) {
      if (r < 0 || r >= robots) {
        throw ConfigError("sensors.gps_robots",
                          "robot id " + std::to_string(r + 1) + " out of range");
      }
    }
  }
  if (!(delta >= 0.0)) throw ConfigError("trigger.delta", "must be >= 0");
  if (ci.enabled) {
    if (!(ci.tau_goal > 0.0)) throw ConfigError("ci.tau_goal", "must be > 0");
    if (ci.epsilon1 < 0.0) throw ConfigError("ci.epsilon1", "must be >= 0");
    if (ci.epsilon2 < 0.0) throw ConfigError("ci.epsilon2", "must be >= 0");
    if (!(ci.omega_tol > 0.0)) throw ConfigError("ci.omega_tol", "must be > 0");
  }
  if (!(cp >= 0.0 && cp <= 1.0)) {
    throw ConfigError("channel.cp", "must be within [0, 1], got " +
                                        std::to_string(cp));
  }
  if (static_cast<int>(init.truth.size()) != robots) {
    throw ConfigError("init.truth", "expected one state per robot");
  }
  for (const auto& x : init.truth) {
    if (x.size() != d) {
      throw ConfigError("init.truth",
                        "each state needs " + std::to_string(d) + " components");
    }
  }
  if (!init.belief_mean.empty()) {
    if (static_cast<int>(init.belief_mean.size()) != robots) {
      throw ConfigError("init.belief_mean", "expected one state per robot");
    }
    for (const auto& x : init.belief_mean) {
      if (x.size() != d) {
        throw ConfigError("init.belief_mean", "each state needs " +
                                                  std::to_string(d) +
                                                  " components");
      }
    }
  }
  if (init.belief_cov_diag.size() != d) {
    throw ConfigError("init.belief_cov_diag",
                      "expected " + std::to_string(d) + " entries");
  }
  for (int c = 0; c < d; ++c) {
    if (!(init.belief_cov_diag[c] > 0.0)) {
      throw ConfigError("init.belief_cov_diag", "entries must be > 0");
    }
  }
  if (!alpha.empty()) {
    if (static_cast<int>(alpha.size()) != robots) {
      throw ConfigError("alpha", "expected one preference vector per agent");
    }
    for (const auto& a : alpha) {
      if (a.size() != layout().total()) {
        throw ConfigError("alpha", "each vector needs " +
                                       std::to_string(layout().total()) +
                                       " entries");
      }
      if ((a.array() < 0.0).any()) {
        throw ConfigError("alpha", "entries must be >= 0");
      }
    }
  }
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  make_topology_checked();
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

const json& require(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path, "missing required field");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

Eigen::VectorXd to_vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "must be an array of numbers");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path, "must be an array of numbers");
    out[static_cast<long>(i)] = v[i].get<double>();
  }
  return out;
}

json from_vector(const Eigen::VectorXd& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ControlSpec control_from_json(const json& j, const std::string& path) {
  ControlSpec c;
  const std::string type = require(j, "type", path + ".type").get<std::string>();
  if (type == "constant") {
    c.type = ControlSpec::Type::Constant;
    c.value = require_number(j, "value", path + ".value");
  } else if (type == "sinusoid") {
    c.type = ControlSpec::Type::Sinusoid;
    c.amplitude = require_number(j, "amplitude", path + ".amplitude");
    c.frequency = require_number(j, "frequency", path + ".frequency");
    c.phase = j.value("phase", 0.0);
  } else {
    throw ConfigError(path + ".type", "must be 'constant' or 'sinusoid'");
  }
  return c;
}

json control_to_json(const ControlSpec& c) {
  if (c.type == ControlSpec::Type::Constant) {
    return json{{"type", "constant"}, {"value", c.value}};
  }
  return json{{"type", "sinusoid"},
              {"amplitude", c.amplitude},
              {"frequency", c.frequency},
              {"phase", c.phase}};
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("(document)", std::string("invalid JSON: ") + e.what());
  }

  ScenarioConfig cfg;
  cfg.name = j.value("name", "unnamed");

  const json& dyn = require(j, "dynamics", "dynamics");
  const std::string kind =
      require(dyn, "kind", "dynamics.kind").get<std::string>();
  if (kind == "linear1d") {
    cfg.dynamics = DynamicsKind::Linear1d;
  } else if (kind == "dubins") {
    cfg.dynamics = DynamicsKind::Dubins;
  } else {
    throw ConfigError("dynamics.kind", "must be 'linear1d' or 'dubins'");
  }
  cfg.dt = require_number(dyn, "dt", "dynamics.dt");
  if (!(cfg.dt > 0.0)) throw ConfigError("dynamics.dt", "must be > 0");
  if (dyn.contains("steps")) {
    cfg.steps = dyn["steps"].get<int>();
  } else if (dyn.contains("duration")) {
    const double duration = dyn["duration"].get<double>();
    const double ratio = duration / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) {
      throw ConfigError("dynamics.duration",
                        "must be an integral number of dt steps");
    }
    cfg.steps = static_cast<int>(std::llround(ratio));
  } else {
    throw ConfigError("dynamics.steps", "missing required field");
  }
  cfg.process_noise_diag = to_vector(
      require(dyn, "process_noise_diag", "dynamics.process_noise_diag"),
      "dynamics.process_noise_diag");
  if (cfg.dynamics == DynamicsKind::Dubins) {
    const json& speeds = require(dyn, "speeds", "dynamics.speeds");
    for (const auto& s : speeds) cfg.speeds.push_back(s.get<double>());
  }

  const json& topo = require(j, "topology", "topology");
  cfg.topology = topology_kind_from_string(
      require(topo, "kind", "topology.kind").get<std::string>());
  cfg.robots = require(topo, "robots", "topology.robots").get<int>();
  if (cfg.topology == TopologyKind::Custom) {
    for (const auto& e : require(topo, "edges", "topology.edges")) {
      cfg.custom_edges.emplace_back(e.at(0).get<int>() - 1,
                                    e.at(1).get<int>() - 1);
    }
  }

  const json& controls = require(j, "controls", "controls");
  for (size_t i = 0; i < controls.size(); ++i) {
    cfg.controls.push_back(control_from_json(
        controls[i], "controls[" + std::to_string(i) + "]"));
  }

  const json& sensors = require(j, "sensors", "sensors");
  if (cfg.dynamics == DynamicsKind::Linear1d) {
    cfg.sensors.self_var = require_number(sensors, "self_var", "sensors.self_var");
    cfg.sensors.relative_var =
        require_number(sensors, "relative_var", "sensors.relative_var");
  } else {
    for (const auto& r : require(sensors, "gps_robots", "sensors.gps_robots")) {
      cfg.sensors.gps_robots.push_back(r.get<int>() - 1);
    }
    cfg.sensors.gps_pos_var =
        require_number(sensors, "gps_pos_var", "sensors.gps_pos_var");
    cfg.sensors.gps_theta_var =
        require_number(sensors, "gps_theta_var", "sensors.gps_theta_var");
    cfg.sensors.range_var =
        require_number(sensors, "range_var", "sensors.range_var");
    cfg.sensors.bearing_var =
        require_number(sensors, "bearing_var", "sensors.bearing_var");
  }

  cfg.delta = require_number(require(j, "trigger", "trigger"), "delta",
                             "trigger.delta");

  if (j.contains("ci")) {
    const json& ci = j["ci"];
    cfg.ci.enabled = ci.value("enabled", false);
    cfg.ci.tau_goal = ci.value("tau_goal", 0.0);
    cfg.ci.epsilon1 = ci.value("epsilon1", 0.0);
    cfg.ci.epsilon2 = ci.value("epsilon2", 0.0);
    cfg.ci.adaptive = ci.value("adaptive", false);
    cfg.ci.omega_tol = ci.value("omega_tol", 1e-6);
    cfg.ci.lossy = ci.value("lossy", false);
  }

  if (j.contains("alpha") && j["alpha"].is_array()) {
    for (size_t i = 0; i < j["alpha"].size(); ++i) {
      cfg.alpha.push_back(
          to_vector(j["alpha"][i], "alpha[" + std::to_string(i) + "]"));
    }
  }

  cfg.cp = require_number(require(j, "channel", "channel"), "cp", "channel.cp");

  const json& init = require(j, "init", "init");
  for (const auto& x : require(init, "truth", "init.truth")) {
    cfg.init.truth.push_back(to_vector(x, "init.truth"));
  }
  if (init.contains("belief_mean") && init["belief_mean"].is_array()) {
    for (const auto& x : init["belief_mean"]) {
      cfg.init.belief_mean.push_back(to_vector(x, "init.belief_mean"));
    }
  }
  cfg.init.belief_cov_diag =
      to_vector(require(init, "belief_cov_diag", "init.belief_cov_diag"),
                "init.belief_cov_diag");

  cfg.seed = j.value("seed", 1ull);
  cfg.runs = j.value("runs", 1);
  if (j.contains("baselines")) {
    cfg.baseline_centralized = j["baselines"].value("centralized", false);
    cfg.baseline_explicit_only = j["baselines"].value("explicit_only", false);
  }
  cfg.implicit_fusion = j.value("implicit_fusion", true);

  cfg.validate();
  return cfg;
}

std::string ScenarioConfig::to_json_text() const {
  json j;
  j["name"] = name;

  json dyn;
  dyn["kind"] = dynamics == DynamicsKind::Dubins ? "dubins" : "linear1d";
  dyn["dt"] = dt;
  dyn["steps"] = steps;
  dyn["process_noise_diag"] = from_vector(process_noise_diag);
  if (dynamics == DynamicsKind::Dubins) dyn["speeds"] = speeds;
  j["dynamics"] = std::move(dyn);

  json topo;
  topo["kind"] = to_string(topology);
  topo["robots"] = robots;
  if (topology == TopologyKind::Custom) {
    json edges = json::array();
    for (auto [a, b] : custom_edges) edges.push_back({a + 1, b + 1});
    topo["edges"] = std::move(edges);
  }
  j["topology"] = std::move(topo);

  json controls_json = json::array();
  for (const auto& c : controls) controls_json.push_back(control_to_json(c));
  j["controls"] = std::move(controls_json);

  json sens;
  if (dynamics == DynamicsKind::Linear1d) {
    sens["self_var"] = sensors.self_var;
    sens["relative_var"] = sensors.relative_var;
  } else {
    json gps = json::array();
    for (int r : sensors.gps_robots) gps.push_back(r + 1);
    sens["gps_robots"] = std::move(gps);
    sens["gps_pos_var"] = sensors.gps_pos_var;
    sens["gps_theta_var"] = sensors.gps_theta_var;
    sens["range_var"] = sensors.range_var;
    sens["bearing_var"] = sensors.bearing_var;
  }
  j["sensors"] = std::move(sens);

  j["trigger"] = {{"delta", delta}};
  j["ci"] = {{"enabled", ci.enabled},     {"tau_goal", ci.tau_goal},
             {"epsilon1", ci.epsilon1},   {"epsilon2", ci.epsilon2},
             {"adaptive", ci.adaptive},   {"omega_tol", ci.omega_tol},
             {"lossy", ci.lossy}};
  if (!alpha.empty()) {
    json a = json::array();
    for (const auto& v : alpha) a.push_back(from_vector(v));
    j["alpha"] = std::move(a);
  }
  j["channel"] = {{"cp", cp}};

  json init_json;
  json truth = json::array();
  for (const auto& x : init.truth) truth.push_back(from_vector(x));
  init_json["truth"] = std::move(truth);
  if (!init.belief_mean.empty()) {
    json bm = json::array();
    for (const auto& x : init.belief_mean) bm.push_back(from_vector(x));
    init_json["belief_mean"] = std::move(bm);
  }
  init_json["belief_cov_diag"] = from_vector(init.belief_cov_diag);
  j["init"] = std::move(init_json);

  j["seed"] = seed;
  j["runs"] = runs;
  j["baselines"] = {{"centralized", baseline_centralized},
                    {"explicit_only", baseline_explicit_only}};
  j["implicit_fusion"] = implicit_fusion;
  return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

// ---------------------------------------------------------------------------
// Registry / dynamics construction
// ---------------------------------------------------------------------------

ModelRegistry build_registry(const ScenarioConfig& config,
                             const Topology& topology) {
  ModelRegistry registry;
  registry.set_agent_count(config.robots);
  for (int i = 0; i < config.robots; ++i) {
    if (config.dynamics == DynamicsKind::Linear1d) {
      registry.push_to_suite(
          i, registry.add({{MeasurementKind::LinearSelf, i, -1},
                           config.sensors.self_var}));
      for (int neighbor : topology.neigh(i)) {
        registry.push_to_suite(
            i, registry.add({{MeasurementKind::LinearRelative, i, neighbor},
                             config.sensors.relative_var}));
      }
    } else {
      const bool has_gps =
          std::find(config.sensors.gps_robots.begin(),
                    config.sensors.gps_robots.end(),
                    i) != config.sensors.gps_robots.end();
      if (has_gps) {
        registry.push_to_suite(i, registry.add({{MeasurementKind::GpsX, i, -1},
                                                config.sensors.gps_pos_var}));
        registry.push_to_suite(i, registry.add({{MeasurementKind::GpsY, i, -1},
                                                config.sensors.gps_pos_var}));
        registry.push_to_suite(
            i, registry.add({{MeasurementKind::GpsTheta, i, -1},
                             config.sensors.gps_theta_var}));
      }
      for (int neighbor : topology.neigh(i)) {
        registry.push_to_suite(
            i, registry.add({{MeasurementKind::Range, i, neighbor},
                             config.sensors.range_var}));
        registry.push_to_suite(
            i, registry.add({{MeasurementKind::Bearing, i, neighbor},
                             config.sensors.bearing_var}));
      }
    }
  }
  return registry;
}

DynamicsModel build_dynamics(const ScenarioConfig& config) {
  DynamicsModel dyn;
  dyn.kind = config.dynamics;
  dyn.dt = config.dt;
  dyn.speeds = config.speeds;
  dyn.process_noise_diag = config.process_noise_diag;
  return dyn;
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::VectorXd vec3(double x, double y, double theta) {
  Eigen::VectorXd v(3);
  v << x, y, theta;
  return v;
}

ScenarioConfig linear_base(const std::string& name, int robots, int steps) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.dynamics = DynamicsKind::Linear1d;
  cfg.dt = 1.0;
  cfg.steps = steps;
  cfg.process_noise_diag = vec1(0.1);
  cfg.topology = TopologyKind::Line;
  cfg.robots = robots;
  cfg.controls.assign(robots, ControlSpec{});
  cfg.sensors.self_var = 0.1;
  cfg.sensors.relative_var = 0.1;
  cfg.delta = 0.75;
  cfg.cp = 1.0;
  for (int i = 0; i < robots; ++i) cfg.init.truth.push_back(vec1(5.0 * i));
  cfg.init.belief_cov_diag = vec1(1.0);
  cfg.seed = 1;
  return cfg;
}

ScenarioConfig dubins6_base(const std::string& name, TopologyKind topo) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.dynamics = DynamicsKind::Dubins;
  cfg.dt = 0.1;
  cfg.steps = 100;  // 10 s
  cfg.process_noise_diag = vec3(0.01, 0.01, 0.001);
  cfg.speeds = {1.0, 0.5, 1.0, 0.5, 0.7, 0.5};
  const double rates[6] = {0.5, 1.0, 1.0, 0.5, 0.1, 0.5};
  for (double w : rates) {
    ControlSpec c;
    c.type = ControlSpec::Type::Constant;
    c.value = w;
    cfg.controls.push_back(c);
  }
  cfg.topology = topo;
  cfg.robots = 6;
  cfg.sensors.gps_robots = {0};
  cfg.sensors.gps_pos_var = 1.0;
  cfg.sensors.gps_theta_var = 1.0;
  cfg.sensors.range_var = 0.05;
  cfg.sensors.bearing_var = 0.05;
  cfg.delta = 0.75;
  cfg.ci.enabled = true;
  cfg.ci.tau_goal = 15.0;
  cfg.cp = 1.0;
  cfg.init.truth = {vec3(0, 0, 0),
                    vec3(-5, 7, std::numbers::pi / 2),
                    vec3(5, 12, std::numbers::pi / 2),
                    vec3(5, -12, 0),
                    vec3(-5, -7, 0),
                    vec3(0, 17, -std::numbers::pi / 2)};
  cfg.init.belief_cov_diag = vec3(1.0, 1.0, 0.1);
  cfg.seed = 1;
  return cfg;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "linear3_example1",  "linear7_fixed_tau", "linear7_adaptive_tau",
      "dubins2_cp_sweep",  "dubins6_star",      "dubins6_bridge",
      "dubins6_chain"};
  return names;
}

ScenarioConfig fixture(const std::string& name) {
  if (name == "linear3_example1") {
    ScenarioConfig cfg = linear_base(name, 3, 300);
    cfg.ci.enabled = true;
    cfg.ci.tau_goal = 5.0;
    cfg.baseline_centralized = true;
    cfg.baseline_explicit_only = true;
    return cfg;
  }
  if (name == "linear7_fixed_tau" || name == "linear7_adaptive_tau") {
    ScenarioConfig cfg = linear_base(name, 7, 600);
    cfg.ci.enabled = true;
    cfg.ci.tau_goal = 5.0;
    if (name == "linear7_adaptive_tau") {
      cfg.ci.adaptive = true;
      cfg.ci.epsilon1 = 0.1;
      cfg.ci.epsilon2 = 0.01;
    }
    return cfg;
  }
  if (name == "dubins2_cp_sweep") {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.dynamics = DynamicsKind::Dubins;
    cfg.dt = 0.05;
    cfg.steps = 200;  // 10 s
    cfg.process_noise_diag = vec3(0.01, 0.01, 0.001);
    cfg.speeds = {1.0, 1.0};
    ControlSpec c1;
    c1.type = ControlSpec::Type::Sinusoid;
    c1.amplitude = 1.0;
    c1.frequency = 0.5;
    c1.phase = std::numbers::pi;
    ControlSpec c2;
    c2.type = ControlSpec::Type::Sinusoid;
    c2.amplitude = 1.0;
    c2.frequency = 0.1;
    c2.phase = 0.0;
    cfg.controls = {c1, c2};
    cfg.topology = TopologyKind::Line;
    cfg.robots = 2;
    cfg.sensors.gps_robots = {0, 1};
    cfg.sensors.gps_pos_var = 1.0;
    cfg.sensors.gps_theta_var = 1.0;
    cfg.sensors.range_var = 0.05;
    cfg.sensors.bearing_var = 0.05;
    cfg.delta = 0.5;
    cfg.cp = 1.0;
    cfg.init.truth = {vec3(-2, 12, 2 * std::numbers::pi / 3),
                      vec3(0, 5, -std::numbers::pi / 2)};
    cfg.init.belief_cov_diag = vec3(1.0, 1.0, 1.0);
    cfg.seed = 1;
    cfg.baseline_explicit_only = true;
    return cfg;
  }
  if (name == "dubins6_star") return dubins6_base(name, TopologyKind::Star);
  if (name == "dubins6_bridge") return dubins6_base(name, TopologyKind::Bridge);
  if (name == "dubins6_chain") return dubins6_base(name, TopologyKind::Chain);
  throw ConfigError("fixture", "unknown fixture '" + name + "'");
}

}  // namespace etcl

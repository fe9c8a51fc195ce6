#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "etcl/ci.hpp"
#include "etcl/layout.hpp"
#include "etcl/models.hpp"
#include "etcl/network.hpp"

namespace etcl {

// Open-loop control schedule for one robot (the turn rate for Dubins, the
// additive displacement for the 1-D model).
struct ControlSpec {
  enum class Type { Constant, Sinusoid };
  Type type = Type::Constant;
  double value = 0.0;      // constant
  double amplitude = 0.0;  // sinusoid: amplitude * sin(frequency * t + phase)
  double frequency = 0.0;
  double phase = 0.0;

  double at(double t) const;
};

struct SensorConfig {
  // linear1d: every robot measures its own position and the offset to each
  // neighbor.
  double self_var = 0.1;
  double relative_var = 0.1;
  // dubins: listed robots carry GPS (x, y, theta); every robot ranges and
  // bears on each neighbor.
  std::vector<int> gps_robots;
  double gps_pos_var = 1.0;
  double gps_theta_var = 1.0;
  double range_var = 0.05;
  double bearing_var = 0.05;
};

struct InitConfig {
  std::vector<Eigen::VectorXd> truth;        // one state vector per robot
  std::vector<Eigen::VectorXd> belief_mean;  // empty: initialize at the truth
  Eigen::VectorXd belief_cov_diag;           // per-robot diagonal
};

struct ScenarioConfig {
  std::string name;

  DynamicsKind dynamics = DynamicsKind::Linear1d;
  double dt = 1.0;
  int steps = 0;
  Eigen::VectorXd process_noise_diag;  // per-robot diagonal
  std::vector<double> speeds;          // dubins only
  std::vector<ControlSpec> controls;   // one per robot

  TopologyKind topology = TopologyKind::Line;
  std::vector<std::pair<int, int>> custom_edges;
  int robots = 0;

  SensorConfig sensors;
  double delta = 0.75;
  CiConfig ci;
  std::vector<Eigen::VectorXd> alpha;  // per-agent preference; empty = ones
  double cp = 1.0;
  InitConfig init;

  std::uint64_t seed = 1;
  int runs = 1;
  bool baseline_centralized = false;
  bool baseline_explicit_only = false;
  bool implicit_fusion = true;

  StateLayout layout() const {
    return {robots, dynamics == DynamicsKind::Dubins ? 3 : 1};
  }
  Topology make_topology_checked() const;
  Eigen::VectorXd alpha_for(int agent) const;

  // Throws ConfigError naming the offending field.
  void validate() const;

  std::string to_json_text() const;
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_file(const std::string& path);
};

// Builds every measurement channel of the scenario with each agent's suite
// in wire order.
ModelRegistry build_registry(const ScenarioConfig& config,
                             const Topology& topology);
DynamicsModel build_dynamics(const ScenarioConfig& config);

const std::vector<std::string>& fixture_names();
ScenarioConfig fixture(const std::string& name);  // ConfigError if unknown

}  // namespace etcl

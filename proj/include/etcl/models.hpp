#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "etcl/layout.hpp"

namespace etcl {

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

enum class DynamicsKind { Linear1d, Dubins };

// x(k+1) = x(k) + u(k) + noise
double linear1d_step(double x, double u, double noise);

// Planar unicycle at fixed speed: position advances along the heading,
// heading integrates the turn-rate control. Heading is wrapped to (-pi, pi].
Eigen::Vector3d dubins_step(const Eigen::Vector3d& state, double speed,
                            double turn_rate, double dt,
                            const Eigen::Vector3d& noise);

// d f / d state at the linearization point (identity plus the heading
// coupling terms). Independent of the turn-rate control.
Eigen::Matrix3d dubins_jacobian(const Eigen::Vector3d& state, double speed,
                                double dt);

// Per-network dynamics: same model family for every robot, per-robot speed
// (Dubins) and shared per-robot process noise diagonal.
struct DynamicsModel {
  DynamicsKind kind = DynamicsKind::Linear1d;
  double dt = 1.0;
  std::vector<double> speeds;          // Dubins only, one per robot
  Eigen::VectorXd process_noise_diag;  // length = state_dim per robot

  int state_dim() const { return kind == DynamicsKind::Dubins ? 3 : 1; }

  Eigen::VectorXd step_robot(int robot, const Eigen::VectorXd& x, double u,
                             const Eigen::VectorXd& noise) const;
  Eigen::MatrixXd jacobian_robot(int robot, const Eigen::VectorXd& x) const;

  // Propagates a stacked network mean through the per-robot transition
  // (noiseless) and returns the block-diagonal Jacobian evaluated at the
  // input mean.
  void propagate(const StateLayout& layout, Eigen::VectorXd& mean,
                 const Eigen::VectorXd& controls, Eigen::MatrixXd* jac) const;

  Eigen::MatrixXd network_process_noise(const StateLayout& layout) const;
};

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

enum class MeasurementKind {
  GpsX,
  GpsY,
  GpsTheta,
  Range,
  Bearing,
  LinearSelf,
  LinearRelative,
};

const char* to_string(MeasurementKind kind);
MeasurementKind measurement_kind_from_string(const std::string& name);

// Euclidean distance and absolute bearing from position a to position b.
// Throws CoincidentPositions when the separation is below 1e-9 m (bearing
// undefined).
std::pair<double, double> range_bearing(const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b);

// Serializable identity of a measurement model: what is measured, by whom,
// of whom. subject is -1 for absolute (non-relative) kinds. Components on
// the wire carry handles, never closures.
struct ModelHandle {
  MeasurementKind kind;
  int taker = -1;
  int subject = -1;

  friend bool operator==(const ModelHandle&, const ModelHandle&) = default;
  friend auto operator<=>(const ModelHandle&, const ModelHandle&) = default;
};

// One scalar measurement channel with its analytic observation function and
// Jacobian row over the stacked network state.
struct MeasurementModel {
  ModelHandle handle;
  double noise_var = 0.0;

  bool is_angle() const {
    return handle.kind == MeasurementKind::GpsTheta ||
           handle.kind == MeasurementKind::Bearing;
  }
  bool is_relative() const {
    return handle.kind == MeasurementKind::Range ||
           handle.kind == MeasurementKind::Bearing ||
           handle.kind == MeasurementKind::LinearRelative;
  }

  double observe(const Eigen::VectorXd& x, const StateLayout& layout) const;
  Eigen::RowVectorXd jacobian(const Eigen::VectorXd& x,
                              const StateLayout& layout) const;
};

// value = observe(truth) + sensor noise, tagged with the model that took it.
struct Measurement {
  int model_index = -1;
  double value = 0.0;
};

// All measurement channels of a scenario, with each agent's sensor suite in
// a fixed order: absolute channels first, then relative channels to each
// neighbor in ascending id. That order is the component order used for
// sequential fusion and for the wire format.
class ModelRegistry {
 public:
  int add(const MeasurementModel& model);

  const MeasurementModel& model(int index) const { return models_.at(index); }
  int size() const { return static_cast<int>(models_.size()); }

  // Throws MalformedMessage for unknown handles.
  int index_of(const ModelHandle& handle) const;
  bool contains(const ModelHandle& handle) const;

  const std::vector<int>& suite(int agent) const;
  void set_agent_count(int n) { suites_.resize(n); }
  void push_to_suite(int agent, int model_index) {
    suites_.at(agent).push_back(model_index);
  }

 private:
  std::vector<MeasurementModel> models_;
  std::map<std::tuple<MeasurementKind, int, int>, int> by_handle_;
  std::vector<std::vector<int>> suites_;
};

}  // namespace etcl

#include "etcl/models.hpp"

#include <cmath>

#include "etcl/angles.hpp"
#include "etcl/errors.hpp"

namespace etcl {

double linear1d_step(double x, double u, double noise) { return x + u + noise; }

Eigen::Vector3d dubins_step(const Eigen::Vector3d& state, double speed,
                            double turn_rate, double dt,
                            const Eigen::Vector3d& noise) {
  Eigen::Vector3d next;
  next[0] = state[0] + speed * std::cos(state[2]) * dt + noise[0];
  next[1] = state[1] + speed * std::sin(state[2]) * dt + noise[1];
  next[2] = wrap_angle(state[2] + turn_rate * dt + noise[2]);
  return next;
}

Eigen::Matrix3d dubins_jacobian(const Eigen::Vector3d& state, double speed,
                                double dt) {
  Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
  jac(0, 2) = -speed * std::sin(state[2]) * dt;
  jac(1, 2) = speed * std::cos(state[2]) * dt;
  return jac;
}

Eigen::VectorXd DynamicsModel::step_robot(int robot, const Eigen::VectorXd& x,
                                          double u,
                                          const Eigen::VectorXd& noise) const {
  if (kind == DynamicsKind::Linear1d) {
    Eigen::VectorXd out(1);
    out[0] = linear1d_step(x[0], u, noise[0]);
    return out;
  }
  return dubins_step(x.head<3>(), speeds.at(robot), u, dt, noise.head<3>());
}

Eigen::MatrixXd DynamicsModel::jacobian_robot(int robot,
                                              const Eigen::VectorXd& x) const {
  if (kind == DynamicsKind::Linear1d) {
    return Eigen::MatrixXd::Identity(1, 1);
  }
  return dubins_jacobian(x.head<3>(), speeds.at(robot), dt);
}

void DynamicsModel::propagate(const StateLayout& layout, Eigen::VectorXd& mean,
                              const Eigen::VectorXd& controls,
                              Eigen::MatrixXd* jac) const {
  const int d = layout.state_dim;
  if (jac) jac->setZero(layout.total(), layout.total());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  for (int r = 0; r < layout.robots; ++r) {
    const Eigen::VectorXd x = mean.segment(r * d, d);
    if (jac) jac->block(r * d, r * d, d, d) = jacobian_robot(r, x);
    mean.segment(r * d, d) = step_robot(r, x, controls[r], zero);
  }
}

Eigen::MatrixXd DynamicsModel::network_process_noise(
    const StateLayout& layout) const {
  Eigen::VectorXd diag(layout.total());
  for (int r = 0; r < layout.robots; ++r) {
    diag.segment(r * layout.state_dim, layout.state_dim) = process_noise_diag;
  }
  return diag.asDiagonal();
}

const char* to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::GpsX: return "gps_x";
    case MeasurementKind::GpsY: return "gps_y";
    case MeasurementKind::GpsTheta: return "gps_theta";
    case MeasurementKind::Range: return "range";
    case MeasurementKind::Bearing: return "bearing";
    case MeasurementKind::LinearSelf: return "linear_self";
    case MeasurementKind::LinearRelative: return "linear_relative";
  }
  return "?";
}

MeasurementKind measurement_kind_from_string(const std::string& name) {
  if (name == "gps_x") return MeasurementKind::GpsX;
  if (name == "gps_y") return MeasurementKind::GpsY;
  if (name == "gps_theta") return MeasurementKind::GpsTheta;
  if (name == "range") return MeasurementKind::Range;
  if (name == "bearing") return MeasurementKind::Bearing;
  if (name == "linear_self") return MeasurementKind::LinearSelf;
  if (name == "linear_relative") return MeasurementKind::LinearRelative;
  throw MalformedMessage("unknown measurement kind '" + name + "'");
}

std::pair<double, double> range_bearing(const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b) {
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  const double dist = std::hypot(dx, dy);
  if (dist < 1e-9) {
    throw CoincidentPositions("range_bearing: positions coincide");
  }
  return {dist, wrap_angle(std::atan2(dy, dx))};
}

double MeasurementModel::observe(const Eigen::VectorXd& x,
                                 const StateLayout& layout) const {
  const int i = handle.taker;
  const int j = handle.subject;
  switch (handle.kind) {
    case MeasurementKind::LinearSelf:
      return x[layout.index(i, 0)];
    case MeasurementKind::LinearRelative:
      return x[layout.index(j, 0)] - x[layout.index(i, 0)];
    case MeasurementKind::GpsX:
      return x[layout.index(i, 0)];
    case MeasurementKind::GpsY:
      return x[layout.index(i, 1)];
    case MeasurementKind::GpsTheta:
      return x[layout.index(i, 2)];
    case MeasurementKind::Range:
    case MeasurementKind::Bearing: {
      const Eigen::Vector2d pi(x[layout.index(i, 0)], x[layout.index(i, 1)]);
      const Eigen::Vector2d pj(x[layout.index(j, 0)], x[layout.index(j, 1)]);
      auto [r, b] = range_bearing(pi, pj);
      return handle.kind == MeasurementKind::Range ? r : b;
    }
  }
  throw MalformedMessage("observe: bad measurement kind");
}

Eigen::RowVectorXd MeasurementModel::jacobian(const Eigen::VectorXd& x,
                                              const StateLayout& layout) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(layout.total());
  const int i = handle.taker;
  const int j = handle.subject;
  switch (handle.kind) {
    case MeasurementKind::LinearSelf:
      row[layout.index(i, 0)] = 1.0;
      break;
    case MeasurementKind::LinearRelative:
      row[layout.index(i, 0)] = -1.0;
      row[layout.index(j, 0)] = 1.0;
      break;
    case MeasurementKind::GpsX:
      row[layout.index(i, 0)] = 1.0;
      break;
    case MeasurementKind::GpsY:
      row[layout.index(i, 1)] = 1.0;
      break;
    case MeasurementKind::GpsTheta:
      row[layout.index(i, 2)] = 1.0;
      break;
    case MeasurementKind::Range: {
      const double dx = x[layout.index(j, 0)] - x[layout.index(i, 0)];
      const double dy = x[layout.index(j, 1)] - x[layout.index(i, 1)];
      const double dist = std::hypot(dx, dy);
      if (dist < 1e-9) {
        throw CoincidentPositions("range Jacobian: positions coincide");
      }
      row[layout.index(i, 0)] = -dx / dist;
      row[layout.index(i, 1)] = -dy / dist;
      row[layout.index(j, 0)] = dx / dist;
      row[layout.index(j, 1)] = dy / dist;
      break;
    }
    case MeasurementKind::Bearing: {
      const double dx = x[layout.index(j, 0)] - x[layout.index(i, 0)];
      const double dy = x[layout.index(j, 1)] - x[layout.index(i, 1)];
      const double d2 = dx * dx + dy * dy;
      if (d2 < 1e-18) {
        throw CoincidentPositions("bearing Jacobian: positions coincide");
      }
      row[layout.index(i, 0)] = dy / d2;
      row[layout.index(i, 1)] = -dx / d2;
      row[layout.index(j, 0)] = -dy / d2;
      row[layout.index(j, 1)] = dx / d2;
      break;
    }
  }
  return row;
}

int ModelRegistry::add(const MeasurementModel& model) {
  const auto key = std::make_tuple(model.handle.kind, model.handle.taker,
                                   model.handle.subject);
  const int index = static_cast<int>(models_.size());
  models_.push_back(model);
  by_handle_[key] = index;
  return index;
}

int ModelRegistry::index_of(const ModelHandle& handle) const {
  const auto it =
      by_handle_.find(std::make_tuple(handle.kind, handle.taker, handle.subject));
  if (it == by_handle_.end()) {
    throw MalformedMessage(std::string("unknown model handle (") +
                           to_string(handle.kind) + ", taker " +
                           std::to_string(handle.taker + 1) + ", subject " +
                           std::to_string(handle.subject + 1) + ")");
  }
  return it->second;
}

bool ModelRegistry::contains(const ModelHandle& handle) const {
  return by_handle_.count(
             std::make_tuple(handle.kind, handle.taker, handle.subject)) > 0;
}

const std::vector<int>& ModelRegistry::suite(int agent) const {
  return suites_.at(agent);
}

}  // namespace etcl

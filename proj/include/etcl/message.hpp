#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "etcl/models.hpp"

namespace etcl {

// Wire format for one simulator round on one directed edge. A DATA message
// lists every component of the sender's suite with an explicit value or an
// implicit marker -- censoring is stated, never inferred from absence, so
// only whole-message loss is ambiguous to the receiver (by design: that is
// the lossy-channel pathology under study). CI_REQUEST/CI_REPLY carry the
// sender's full belief.

enum class MessageKind { Data, CiRequest, CiReply };

const char* to_string(MessageKind kind);

struct ComponentEntry {
  ModelHandle model;
  bool is_explicit = false;
  double value = 0.0;  // meaningful only when is_explicit

  friend bool operator==(const ComponentEntry&,
                         const ComponentEntry&) = default;
};

struct CiPayload {
  Eigen::VectorXd mean;
  std::vector<double> cov_lower;  // row-major packed lower triangle

  static CiPayload from(const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov);
  Eigen::MatrixXd covariance() const;
};

struct Message {
  int step = 0;
  int sender = -1;
  int receiver = -1;
  MessageKind kind = MessageKind::Data;
  double ci_rate = 0.0;  // sender's cumulative CI trigger rate (DATA header)
  std::vector<ComponentEntry> components;
  std::optional<CiPayload> ci;

  std::string to_json() const;
  static Message from_json(const std::string& text);
};

}  // namespace etcl

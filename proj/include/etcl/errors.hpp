#pragma once

#include <stdexcept>
#include <string>

namespace etcl {

// Base class for all library errors so callers can catch coarsely.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// stats: truncation window carries less probability mass than the floor.
struct DegenerateWindow : Error {
  using Error::Error;
};

// models: bearing undefined for coincident positions.
struct CoincidentPositions : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct UnknownNeighbor : Error {
  using Error::Error;
};

struct MalformedMessage : Error {
  using Error::Error;
};

struct NonEdgeMessage : Error {
  using Error::Error;
};

struct BadSize : Error {
  using Error::Error;
};

struct EmptyStats : Error {
  using Error::Error;
};

struct SingularCovariance : Error {
  using Error::Error;
};

// Scenario/config validation failure. `field` is the dotted path of the
// offending entry, e.g. "channel.cp".
struct ConfigError : Error {
  std::string field;
  ConfigError(std::string field_path, const std::string& what)
      : Error(field_path + ": " + what), field(std::move(field_path)) {}
};

// Non-finite state or covariance encountered mid-run.
struct NumericalError : Error {
  int step = -1;
  int agent = -1;
  NumericalError(const std::string& what, int at_step, int at_agent)
      : Error("step " + std::to_string(at_step) + ", agent " +
              std::to_string(at_agent) + ": " + what),
        step(at_step),
        agent(at_agent) {}
};

}  // namespace etcl

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "etcl/layout.hpp"
#include "etcl/network.hpp"

namespace etcl {

// Per-step, per-agent readouts of one run. Squared errors are against the
// truth realization (angle components wrapped); reported_var is the diagonal
// of the agent's own network covariance.
struct StepAgentMetrics {
  Eigen::VectorXd sq_err;
  Eigen::VectorXd reported_var;
  double wtrace = 0.0;
  double tau = 0.0;
  double ci_rate = 0.0;
  double cum_explicit_fraction = 0.0;
};

struct StepTrackMetrics {
  Eigen::VectorXd sq_err;
  Eigen::VectorXd reported_var;
};

struct RunMetrics {
  StateLayout layout;
  int steps = 0;

  std::vector<std::vector<StepAgentMetrics>> agents;           // [step][agent]
  std::vector<StepTrackMetrics> centralized;                   // [step], may be empty
  std::vector<std::vector<StepTrackMetrics>> explicit_only;    // [step][agent], may be empty

  CommStats comm;
  long ci_events = 0;  // trigger firings summed over agents
  double explicit_fraction = 0.0;
  double confusion = 0.0;

  // Instrumentation maxima over the whole run.
  double max_common_mean_diff = 0.0;
  double max_common_cov_diff = 0.0;
  double max_mean_diff_vs_centralized = 0.0;
  double max_cov_diff_vs_centralized = 0.0;

  int n_agents() const {
    return agents.empty() ? 0 : static_cast<int>(agents.front().size());
  }
};

struct BatchMetrics {
  std::vector<RunMetrics> runs;
};

// First step index (0-based into the metric arrays) after the 20% burn-in.
int burn_in_start(int steps);

// Sum of squared errors across all agents and all network components at one
// step; `from` variants average over post-burn-in steps.
double total_sq_err_at(const RunMetrics& run, int step_index);
double total_sq_err_explicit_only_at(const RunMetrics& run, int step_index);
double time_avg_total_sq_err(const RunMetrics& run, int from);
double time_avg_total_sq_err_explicit_only(const RunMetrics& run, int from);

// Per-agent reductions.
double agent_final_sq_err(const RunMetrics& run, int agent);
double agent_mean_trace(const RunMetrics& run, int agent, int from);
double agent_mean_wtrace(const RunMetrics& run, int agent, int from);
double centralized_mean_trace(const RunMetrics& run, int from);
double agent_final_ci_rate(const RunMetrics& run, int agent);

// Long-format CSV: header "step,agent,metric,value". Agent labels are the
// 1-based robot ids plus "centralized" and "xonly_<id>" for baseline tracks.
// Metric keys: err2_<robot>.<comp>, var_<robot>.<comp>, wtrace, tau, ci_rate,
// cum_explicit_frac.
void write_metrics_csv(std::ostream& out, const RunMetrics& run);

}  // namespace etcl

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etcl/metrics.hpp"
#include "etcl/scenario.hpp"

namespace etcl {

// Simulates one realization: seeded truth and measurements, synchronous
// agent rounds over the lossy channel, CI exchanges at the round barrier,
// and optional baselines (a centralized filter fusing every measurement, and
// an explicit-only shadow per agent that consumes the same delivered message
// stream but ignores implicit markers). Baselines see the exact same noise
// realizations as the agents.
RunMetrics run_scenario(const ScenarioConfig& config);
RunMetrics run_scenario_with_seed(const ScenarioConfig& config,
                                  std::uint64_t run_seed);

// n_runs independent realizations with per-run seeds derived from the config
// seed. Deterministic regardless of the worker-thread count (ETCL_WORKERS).
BatchMetrics monte_carlo(const ScenarioConfig& config, int n_runs);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  double explicit_fraction = 0.0;
  double confusion_ratio = 0.0;
  double final_mse = 0.0;                 // batch mean, all agents/components
  double final_reported_trace = 0.0;      // batch mean, averaged over agents
  double final_mse_explicit_only = 0.0;   // 0 when the baseline is disabled
};

// Re-runs the scenario for each axis value ("delta" or "cp") with paired
// per-run seeds so rows are comparable realization-for-realization.
std::vector<SweepRow> sweep(const ScenarioConfig& config,
                            const std::string& axis,
                            const std::vector<double>& values, int n_runs);

}  // namespace etcl

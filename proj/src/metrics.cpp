#include "etcl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace etcl {

int burn_in_start(int steps) {
  return static_cast<int>(std::ceil(0.2 * steps));
}

double total_sq_err_at(const RunMetrics& run, int step_index) {
  double total = 0.0;
  for (const auto& a : run.agents.at(step_index)) total += a.sq_err.sum();
  return total;
}

double total_sq_err_explicit_only_at(const RunMetrics& run, int step_index) {
  double total = 0.0;
  for (const auto& a : run.explicit_only.at(step_index)) total += a.sq_err.sum();
  return total;
}

double time_avg_total_sq_err(const RunMetrics& run, int from) {
  if (run.steps <= from) return 0.0;
  double total = 0.0;
  for (int k = from; k < run.steps; ++k) total += total_sq_err_at(run, k);
  return total / (run.steps - from);
}

double time_avg_total_sq_err_explicit_only(const RunMetrics& run, int from) {
  if (run.steps <= from) return 0.0;
  double total = 0.0;
  for (int k = from; k < run.steps; ++k)
    total += total_sq_err_explicit_only_at(run, k);
  return total / (run.steps - from);
}

double agent_final_sq_err(const RunMetrics& run, int agent) {
  return run.agents.back().at(agent).sq_err.sum();
}

double agent_mean_trace(const RunMetrics& run, int agent, int from) {
  if (run.steps <= from) return 0.0;
  double total = 0.0;
  for (int k = from; k < run.steps; ++k)
    total += run.agents[k][agent].reported_var.sum();
  return total / (run.steps - from);
}

double agent_mean_wtrace(const RunMetrics& run, int agent, int from) {
  if (run.steps <= from) return 0.0;
  double total = 0.0;
  for (int k = from; k < run.steps; ++k) total += run.agents[k][agent].wtrace;
  return total / (run.steps - from);
}

double centralized_mean_trace(const RunMetrics& run, int from) {
  if (run.steps <= from || run.centralized.empty()) return 0.0;
  double total = 0.0;
  for (int k = from; k < run.steps; ++k)
    total += run.centralized[k].reported_var.sum();
  return total / (run.steps - from);
}

double agent_final_ci_rate(const RunMetrics& run, int agent) {
  return run.agents.back().at(agent).ci_rate;
}

namespace {

void emit(std::ostream& out, int step, const std::string& agent,
          const std::string& metric, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out << step << ',' << agent << ',' << metric << ',' << buf << '\n';
}

}  // namespace

void write_metrics_csv(std::ostream& out, const RunMetrics& run) {
  out << "step,agent,metric,value\n";
  const StateLayout& layout = run.layout;
  for (int k = 0; k < run.steps; ++k) {
    const int step = k + 1;
    for (int a = 0; a < run.n_agents(); ++a) {
      const StepAgentMetrics& m = run.agents[k][a];
      const std::string label = std::to_string(a + 1);
      for (int c = 0; c < layout.total(); ++c) {
        emit(out, step, label, "err2_" + layout.comp_label(c), m.sq_err[c]);
        emit(out, step, label, "var_" + layout.comp_label(c), m.reported_var[c]);
      }
      emit(out, step, label, "wtrace", m.wtrace);
      emit(out, step, label, "tau", m.tau);
      emit(out, step, label, "ci_rate", m.ci_rate);
      emit(out, step, label, "cum_explicit_frac", m.cum_explicit_fraction);
    }
    if (!run.centralized.empty()) {
      const StepTrackMetrics& m = run.centralized[k];
      for (int c = 0; c < layout.total(); ++c) {
        emit(out, step, "centralized", "err2_" + layout.comp_label(c), m.sq_err[c]);
        emit(out, step, "centralized", "var_" + layout.comp_label(c),
             m.reported_var[c]);
      }
    }
    if (!run.explicit_only.empty()) {
      for (int a = 0; a < static_cast<int>(run.explicit_only[k].size()); ++a) {
        const StepTrackMetrics& m = run.explicit_only[k][a];
        const std::string label = "xonly_" + std::to_string(a + 1);
        for (int c = 0; c < layout.total(); ++c) {
          emit(out, step, label, "err2_" + layout.comp_label(c), m.sq_err[c]);
          emit(out, step, label, "var_" + layout.comp_label(c), m.reported_var[c]);
        }
      }
    }
  }
}

}  // namespace etcl

#include "etcl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "etcl/agent.hpp"
#include "etcl/angles.hpp"
#include "etcl/errors.hpp"
#include "etcl/filter.hpp"
#include "etcl/rng.hpp"

namespace etcl {

namespace {

Eigen::VectorXd stack_states(const std::vector<Eigen::VectorXd>& per_robot) {
  long total = 0;
  for (const auto& x : per_robot) total += x.size();
  Eigen::VectorXd out(total);
  long at = 0;
  for (const auto& x : per_robot) {
    out.segment(at, x.size()) = x;
    at += x.size();
  }
  return out;
}

GaussianBelief initial_belief(const ScenarioConfig& cfg) {
  const StateLayout layout = cfg.layout();
  GaussianBelief belief;
  belief.mean = cfg.init.belief_mean.empty() ? stack_states(cfg.init.truth)
                                             : stack_states(cfg.init.belief_mean);
  Eigen::VectorXd diag(layout.total());
  for (int r = 0; r < layout.robots; ++r) {
    diag.segment(r * layout.state_dim, layout.state_dim) =
        cfg.init.belief_cov_diag;
  }
  belief.cov = diag.asDiagonal();
  belief.step = 0;
  return belief;
}

std::vector<int> angle_indices(const StateLayout& layout) {
  std::vector<int> idx;
  if (layout.state_dim == 3) {
    for (int r = 0; r < layout.robots; ++r) idx.push_back(layout.index(r, 2));
  }
  return idx;
}

GaussianBelief payload_belief(const Message& msg, int step) {
  GaussianBelief b;
  b.mean = msg.ci->mean;
  b.cov = msg.ci->covariance();
  b.step = step;
  return b;
}

Eigen::VectorXd squared_error(const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& truth,
                              const StateLayout& layout) {
  Eigen::VectorXd out(mean.size());
  for (long c = 0; c < mean.size(); ++c) {
    const double err = layout.is_angle(static_cast<int>(c))
                           ? angle_diff(mean[c], truth[c])
                           : mean[c] - truth[c];
    out[c] = err * err;
  }
  return out;
}

void check_finite(const GaussianBelief& belief, int step, int agent_display_id,
                  const char* what) {
  if (!belief.is_finite()) {
    throw NumericalError(std::string(what) + " became non-finite", step,
                         agent_display_id);
  }
}

int worker_count(int runs) {
  int workers = 1;
  if (const char* env = std::getenv("ETCL_WORKERS")) {
    workers = std::max(1, std::atoi(env));
  } else {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  return std::min(workers, runs);
}

}  // namespace

RunMetrics run_scenario_with_seed(const ScenarioConfig& cfg,
                                  std::uint64_t run_seed) {
  cfg.validate();
  const StateLayout layout = cfg.layout();
  const Topology topology = cfg.make_topology_checked();
  const ModelRegistry registry = build_registry(cfg, topology);
  const DynamicsModel dynamics = build_dynamics(cfg);
  const std::vector<int> angles = angle_indices(layout);
  const int n = cfg.robots;

  std::vector<Agent> agents;
  agents.reserve(n);
  const GaussianBelief init = initial_belief(cfg);
  for (int i = 0; i < n; ++i) {
    agents.emplace_back(i, layout, &topology, &registry, init, cfg.delta,
                        cfg.ci, cfg.alpha_for(i), cfg.implicit_fusion);
  }

  GaussianBelief centralized = init;
  std::vector<GaussianBelief> shadows;
  if (cfg.baseline_explicit_only) shadows.assign(n, init);

  std::vector<RngStream> process_streams;
  std::vector<std::vector<RngStream>> meas_streams(n);
  for (int r = 0; r < n; ++r) {
    process_streams.emplace_back(derive_seed(run_seed, "truth", r));
    const auto& suite = registry.suite(r);
    for (size_t slot = 0; slot < suite.size(); ++slot) {
      meas_streams[r].emplace_back(derive_seed(run_seed, "meas", r, slot));
    }
  }

  ChannelConfig channel_cfg;
  channel_cfg.cp = cfg.cp;
  channel_cfg.ci_lossy = cfg.ci.lossy;
  channel_cfg.run_seed = run_seed;
  Channel channel(topology, channel_cfg);

  RunMetrics metrics;
  metrics.layout = layout;
  metrics.steps = cfg.steps;
  metrics.agents.resize(cfg.steps);
  if (cfg.baseline_centralized) metrics.centralized.resize(cfg.steps);
  if (cfg.baseline_explicit_only) metrics.explicit_only.resize(cfg.steps);

  Eigen::VectorXd truth = stack_states(cfg.init.truth);
  std::vector<long> agent_explicit(n, 0);
  std::vector<long> agent_total(n, 0);
  const int d = layout.state_dim;

  for (int k = 1; k <= cfg.steps; ++k) {
    const double t = (k - 1) * cfg.dt;
    Eigen::VectorXd controls(n);
    for (int r = 0; r < n; ++r) controls[r] = cfg.controls[r].at(t);

    // Truth and measurements for this step.
    for (int r = 0; r < n; ++r) {
      Eigen::VectorXd noise(d);
      for (int c = 0; c < d; ++c) {
        noise[c] = process_streams[r].gaussian(std::sqrt(cfg.process_noise_diag[c]));
      }
      truth.segment(r * d, d) =
          dynamics.step_robot(r, truth.segment(r * d, d), controls[r], noise);
    }
    std::vector<std::vector<Measurement>> measurements(n);
    for (int r = 0; r < n; ++r) {
      const auto& suite = registry.suite(r);
      for (size_t slot = 0; slot < suite.size(); ++slot) {
        const MeasurementModel& model = registry.model(suite[slot]);
        double value = model.observe(truth, layout) +
                       meas_streams[r][slot].gaussian(std::sqrt(model.noise_var));
        if (model.is_angle()) value = wrap_angle(value);
        measurements[r].push_back({suite[slot], value});
      }
    }

    // Agent round: sends from start-of-round state, delivery at the barrier.
    std::vector<std::vector<Message>> outboxes(n);
    for (int i = 0; i < n; ++i) {
      outboxes[i] = agents[i].begin_step(k, dynamics, controls, measurements[i]);
      for (const Message& msg : outboxes[i]) {
        for (const auto& c : msg.components) {
          ++agent_total[i];
          if (c.is_explicit) ++agent_explicit[i];
        }
      }
    }
    const auto inboxes = channel.deliver(outboxes, metrics.comm);
    for (int i = 0; i < n; ++i) agents[i].finish_step(k, inboxes[i]);

    // CI at the round barrier: triggers evaluated on post-fusion beliefs,
    // exchanges resolved in ascending initiator order, fusing sequentially.
    std::vector<char> fired(n, 0);
    if (cfg.ci.enabled) {
      for (int i = 0; i < n; ++i) fired[i] = agents[i].wants_ci() ? 1 : 0;
      for (int i = 0; i < n; ++i) {
        if (!fired[i]) continue;
        for (int j : topology.neigh(i)) {
          Message request;
          request.step = k;
          request.sender = i;
          request.receiver = j;
          request.kind = MessageKind::CiRequest;
          request.ci = CiPayload::from(agents[i].own_belief().mean,
                                       agents[i].own_belief().cov);
          const auto req_inbox = channel.deliver({{request}}, metrics.comm);
          if (req_inbox[j].empty()) continue;

          Message reply;
          reply.step = k;
          reply.sender = j;
          reply.receiver = i;
          reply.kind = MessageKind::CiReply;
          reply.ci = CiPayload::from(agents[j].own_belief().mean,
                                     agents[j].own_belief().cov);
          const auto rep_inbox = channel.deliver({{reply}}, metrics.comm);

          // Two independent fusions of the same pair of inputs.
          const GaussianBelief input_i = payload_belief(req_inbox[j].front(), k);
          const GaussianBelief own_j = agents[j].own_belief();
          agents[j].own_belief() =
              ci_fuse(own_j, input_i, agents[j].alpha(), cfg.ci.omega_tol, angles)
                  .first;
          if (!rep_inbox[i].empty()) {
            const GaussianBelief input_j = payload_belief(rep_inbox[i].front(), k);
            const GaussianBelief own_i = agents[i].own_belief();
            agents[i].own_belief() =
                ci_fuse(own_i, input_j, agents[i].alpha(), cfg.ci.omega_tol,
                        angles)
                    .first;
          }
          ++metrics.comm.ci_exchanges;
        }
      }
      for (int i = 0; i < n; ++i) metrics.ci_events += fired[i];
    }
    for (int i = 0; i < n; ++i) agents[i].end_round(fired[i] != 0);

    // Baselines consume the identical realizations.
    if (cfg.baseline_centralized) {
      predict(centralized, dynamics, layout, controls);
      for (int r = 0; r < n; ++r) {
        for (const Measurement& m : measurements[r]) {
          fuse_explicit_scalar(centralized, registry.model(m.model_index),
                               layout, m.value);
        }
      }
      check_finite(centralized, k, 0, "centralized belief");
    }
    if (cfg.baseline_explicit_only) {
      for (int i = 0; i < n; ++i) {
        predict(shadows[i], dynamics, layout, controls);
        for (const Measurement& m : measurements[i]) {
          fuse_explicit_scalar(shadows[i], registry.model(m.model_index), layout,
                               m.value);
        }
        for (const Message& msg : inboxes[i]) {
          if (msg.kind != MessageKind::Data) continue;
          for (const auto& c : msg.components) {
            if (!c.is_explicit) continue;
            fuse_explicit_scalar(shadows[i],
                                 registry.model(registry.index_of(c.model)),
                                 layout, c.value);
          }
        }
        check_finite(shadows[i], k, i + 1, "explicit-only belief");
      }
    }

    // Instrumentation and per-step records.
    for (const auto& [a, b] : topology.edges()) {
      const auto [mean_diff, cov_diff] =
          Agent::common_divergence(agents[a], agents[b]);
      metrics.max_common_mean_diff =
          std::max(metrics.max_common_mean_diff, mean_diff);
      metrics.max_common_cov_diff =
          std::max(metrics.max_common_cov_diff, cov_diff);
    }
    auto& step_row = metrics.agents[k - 1];
    step_row.resize(n);
    for (int i = 0; i < n; ++i) {
      const GaussianBelief& belief = agents[i].own_belief();
      check_finite(belief, k, i + 1, "own belief");
      StepAgentMetrics& rec = step_row[i];
      rec.sq_err = squared_error(belief.mean, truth, layout);
      rec.reported_var = belief.cov.diagonal();
      rec.wtrace = weighted_trace(belief.cov, agents[i].alpha());
      rec.tau = agents[i].ci_state().tau;
      rec.ci_rate = agents[i].ci_state().rate();
      rec.cum_explicit_fraction =
          agent_total[i] > 0
              ? static_cast<double>(agent_explicit[i]) / agent_total[i]
              : 0.0;
      if (cfg.baseline_centralized) {
        metrics.max_mean_diff_vs_centralized =
            std::max(metrics.max_mean_diff_vs_centralized,
                     (belief.mean - centralized.mean).cwiseAbs().maxCoeff());
        metrics.max_cov_diff_vs_centralized =
            std::max(metrics.max_cov_diff_vs_centralized,
                     (belief.cov - centralized.cov).cwiseAbs().maxCoeff());
      }
    }
    if (cfg.baseline_centralized) {
      metrics.centralized[k - 1].sq_err =
          squared_error(centralized.mean, truth, layout);
      metrics.centralized[k - 1].reported_var = centralized.cov.diagonal();
    }
    if (cfg.baseline_explicit_only) {
      auto& row = metrics.explicit_only[k - 1];
      row.resize(n);
      for (int i = 0; i < n; ++i) {
        row[i].sq_err = squared_error(shadows[i].mean, truth, layout);
        row[i].reported_var = shadows[i].cov.diagonal();
      }
    }
  }

  if (metrics.comm.total_components > 0) {
    metrics.explicit_fraction = explicit_fraction(metrics.comm);
    metrics.confusion = confusion_ratio(metrics.comm);
  }
  return metrics;
}

RunMetrics run_scenario(const ScenarioConfig& cfg) {
  return run_scenario_with_seed(cfg, derive_seed(cfg.seed, "run", 0));
}

BatchMetrics monte_carlo(const ScenarioConfig& cfg, int n_runs) {
  if (n_runs < 1) throw ConfigError("runs", "must be >= 1");
  BatchMetrics batch;
  batch.runs.resize(n_runs);
  const int workers = worker_count(n_runs);
  if (workers <= 1) {
    for (int r = 0; r < n_runs; ++r) {
      batch.runs[r] = run_scenario_with_seed(cfg, derive_seed(cfg.seed, "run", r));
    }
    return batch;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = w; r < n_runs; r += workers) {
        try {
          batch.runs[r] =
              run_scenario_with_seed(cfg, derive_seed(cfg.seed, "run", r));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return batch;
}

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::string& axis,
                            const std::vector<double>& values, int n_runs) {
  if (axis != "delta" && axis != "cp") {
    throw ConfigError("sweep.axis", "must be 'delta' or 'cp'");
  }
  if (values.empty()) {
    throw ConfigError("sweep.values", "must not be empty");
  }
  std::vector<SweepRow> rows;
  for (double value : values) {
    ScenarioConfig variant = cfg;
    if (axis == "delta") {
      variant.delta = value;
    } else {
      variant.cp = value;
    }
    variant.validate();
    const BatchMetrics batch = monte_carlo(variant, n_runs);

    SweepRow row;
    row.axis = axis;
    row.value = value;
    for (const RunMetrics& run : batch.runs) {
      row.explicit_fraction += run.explicit_fraction;
      row.confusion_ratio += run.confusion;
      if (run.steps > 0) {
        row.final_mse += total_sq_err_at(run, run.steps - 1);
        double trace_sum = 0.0;
        for (int i = 0; i < run.n_agents(); ++i) {
          trace_sum += run.agents.back()[i].reported_var.sum();
        }
        row.final_reported_trace += trace_sum / run.n_agents();
        if (!run.explicit_only.empty()) {
          row.final_mse_explicit_only +=
              total_sq_err_explicit_only_at(run, run.steps - 1);
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(batch.runs.size());
    row.explicit_fraction *= inv;
    row.confusion_ratio *= inv;
    row.final_mse *= inv;
    row.final_reported_trace *= inv;
    row.final_mse_explicit_only *= inv;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace etcl

// Command-line front end: run scenarios, sweep a parameter axis, and manage
// the bundled fixture configs. Outputs are plot-ready tables plus a manifest
// so every result can be traced back to the exact config and seed.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "etcl/errors.hpp"
#include "etcl/metrics.hpp"
#include "etcl/rng.hpp"
#include "etcl/runner.hpp"
#include "etcl/scenario.hpp"
#include "etcl/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::string fixture_name;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int runs = 0;
  double delta = -1.0;
  bool delta_set = false;
  double cp = -1.0;
  bool cp_set = false;
  std::string topology;
  bool no_ci = false;
  bool no_implicit = false;
  std::vector<std::string> baselines;
};

std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(etcl::fnv1a64(bytes)));
  return buf;
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "scenario config file (JSON)");
  cmd->add_option("--fixture", opt.fixture_name, "bundled fixture name");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "master seed override")
      ->each([&](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--runs", opt.runs, "Monte Carlo run count override");
  cmd->add_option("--delta", opt.delta, "event trigger threshold override")
      ->each([&](const std::string&) { opt.delta_set = true; });
  cmd->add_option("--cp", opt.cp, "communication success probability override")
      ->each([&](const std::string&) { opt.cp_set = true; });
  cmd->add_option("--topology", opt.topology, "topology kind override");
  cmd->add_flag("--no-ci", opt.no_ci, "disable covariance intersection");
  cmd->add_flag("--no-implicit", opt.no_implicit, "disable implicit fusion");
  cmd->add_option("--baseline", opt.baselines,
                  "enable a baseline: centralized | explicit-only");
}

// Loads the scenario, applies overrides, and returns the content hash of the
// configuration as it entered the program (file bytes, or canonical fixture
// JSON).
etcl::ScenarioConfig load_scenario(const CommonOptions& opt,
                                   std::string* config_hash) {
  if (opt.config_path.empty() == opt.fixture_name.empty()) {
    throw etcl::ConfigError("(usage)",
                            "exactly one of --config or --fixture is required");
  }
  etcl::ScenarioConfig cfg;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) {
      throw etcl::ConfigError("(file)", "cannot open '" + opt.config_path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    *config_hash = hash_hex(buffer.str());
    cfg = etcl::ScenarioConfig::from_json_text(buffer.str());
  } else {
    cfg = etcl::fixture(opt.fixture_name);
    *config_hash = hash_hex(cfg.to_json_text());
  }

  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.runs > 0) cfg.runs = opt.runs;
  if (opt.delta_set) cfg.delta = opt.delta;
  if (opt.cp_set) cfg.cp = opt.cp;
  if (!opt.topology.empty()) {
    cfg.topology = etcl::topology_kind_from_string(opt.topology);
  }
  if (opt.no_ci) cfg.ci.enabled = false;
  if (opt.no_implicit) cfg.implicit_fusion = false;
  for (const std::string& b : opt.baselines) {
    if (b == "centralized") {
      cfg.baseline_centralized = true;
    } else if (b == "explicit-only") {
      cfg.baseline_explicit_only = true;
    } else {
      throw etcl::ConfigError("baseline",
                              "must be 'centralized' or 'explicit-only'");
    }
  }
  cfg.validate();
  return cfg;
}

void write_manifest(const fs::path& dir, const etcl::ScenarioConfig& cfg,
                    const std::string& config_hash) {
  json manifest;
  manifest["schema_version"] = etcl::kSchemaVersion;
  manifest["code_version"] = etcl::kVersion;
  manifest["config_hash"] = config_hash;
  manifest["name"] = cfg.name;
  manifest["seed"] = cfg.seed;
  manifest["runs"] = cfg.runs;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

json agent_summaries(const etcl::BatchMetrics& batch) {
  const etcl::RunMetrics& first = batch.runs.front();
  const int n = first.n_agents();
  const int burn = etcl::burn_in_start(first.steps);
  json agents = json::array();
  for (int i = 0; i < n; ++i) {
    double final_mse = 0.0, final_trace = 0.0, wtrace = 0.0, rate = 0.0;
    for (const auto& run : batch.runs) {
      if (run.steps == 0) continue;
      final_mse += etcl::agent_final_sq_err(run, i);
      final_trace += run.agents.back()[i].reported_var.sum();
      wtrace += etcl::agent_mean_wtrace(run, i, burn);
      rate += etcl::agent_final_ci_rate(run, i);
    }
    const double inv = 1.0 / static_cast<double>(batch.runs.size());
    agents.push_back({{"agent", i + 1},
                      {"final_mse", final_mse * inv},
                      {"final_trace", final_trace * inv},
                      {"mean_wtrace_postburn", wtrace * inv},
                      {"final_ci_rate", rate * inv}});
  }
  return agents;
}

void write_summary(const fs::path& dir, const etcl::ScenarioConfig& cfg,
                   const etcl::BatchMetrics& batch) {
  json summary;
  summary["schema_version"] = etcl::kSchemaVersion;
  summary["name"] = cfg.name;
  summary["runs"] = static_cast<int>(batch.runs.size());
  summary["steps"] = cfg.steps;

  double frac = 0.0, confusion = 0.0, events = 0.0, final_mse = 0.0;
  double sym_mean = 0.0, sym_cov = 0.0;
  json per_run_fraction = json::array();
  for (const auto& run : batch.runs) {
    frac += run.explicit_fraction;
    confusion += run.confusion;
    events += static_cast<double>(run.ci_events);
    if (run.steps > 0) final_mse += etcl::total_sq_err_at(run, run.steps - 1);
    sym_mean = std::max(sym_mean, run.max_common_mean_diff);
    sym_cov = std::max(sym_cov, run.max_common_cov_diff);
    per_run_fraction.push_back(run.explicit_fraction);
  }
  const double inv = 1.0 / static_cast<double>(batch.runs.size());
  summary["explicit_fraction"] = {{"mean", frac * inv},
                                  {"per_run", per_run_fraction}};
  summary["confusion_ratio"] = {{"mean", confusion * inv}};
  summary["ci_events"] = {{"mean", events * inv}};
  summary["final_mse_total"] = {{"mean", final_mse * inv}};
  summary["common_symmetry"] = {{"max_mean_diff", sym_mean},
                                {"max_cov_diff", sym_cov}};
  if (cfg.steps > 0) summary["per_agent"] = agent_summaries(batch);

  if (cfg.baseline_centralized) {
    double mean_diff = 0.0, cov_diff = 0.0, trace = 0.0;
    for (const auto& run : batch.runs) {
      mean_diff = std::max(mean_diff, run.max_mean_diff_vs_centralized);
      cov_diff = std::max(cov_diff, run.max_cov_diff_vs_centralized);
      if (run.steps > 0) trace += run.centralized.back().reported_var.sum();
    }
    summary["baselines"]["centralized"] = {
        {"max_abs_mean_diff", mean_diff},
        {"max_abs_cov_diff", cov_diff},
        {"final_trace", trace * inv}};
  }
  if (cfg.baseline_explicit_only) {
    double mse = 0.0;
    for (const auto& run : batch.runs) {
      if (run.steps > 0) {
        mse += etcl::total_sq_err_explicit_only_at(run, run.steps - 1);
      }
    }
    summary["baselines"]["explicit_only"] = {{"final_mse_total", mse * inv}};
  }

  std::ofstream out(dir / "summary.json");
  out << summary.dump(2) << "\n";
}

int cmd_run(const CommonOptions& opt) {
  std::string config_hash;
  const etcl::ScenarioConfig cfg = load_scenario(opt, &config_hash);
  fs::create_directories(opt.out_dir);

  const etcl::BatchMetrics batch = etcl::monte_carlo(cfg, cfg.runs);

  std::ofstream csv(fs::path(opt.out_dir) / "metrics.csv");
  etcl::write_metrics_csv(csv, batch.runs.front());
  write_summary(opt.out_dir, cfg, batch);
  write_manifest(opt.out_dir, cfg, config_hash);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opt, const std::string& axis,
              const std::vector<double>& values) {
  std::string config_hash;
  const etcl::ScenarioConfig cfg = load_scenario(opt, &config_hash);
  fs::create_directories(opt.out_dir);

  const auto rows = etcl::sweep(cfg, axis, values, cfg.runs);

  std::ofstream csv(fs::path(opt.out_dir) / "sweep_summary.csv");
  csv << "axis,value,explicit_fraction,confusion_ratio,final_mse,"
         "final_reported_trace,final_mse_explicit_only\n";
  char buf[64];
  for (const auto& row : rows) {
    csv << row.axis;
    for (double v : {row.value, row.explicit_fraction, row.confusion_ratio,
                     row.final_mse, row.final_reported_trace,
                     row.final_mse_explicit_only}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      csv << ',' << buf;
    }
    csv << '\n';
  }
  write_manifest(opt.out_dir, cfg, config_hash);
  return kExitOk;
}

int cmd_fixtures(bool list, const std::string& name, const std::string& out) {
  if (list) {
    for (const auto& n : etcl::fixture_names()) std::cout << n << "\n";
    return kExitOk;
  }
  const etcl::ScenarioConfig cfg = etcl::fixture(name);
  if (out.empty()) {
    std::cout << cfg.to_json_text();
  } else {
    std::ofstream f(out);
    f << cfg.to_json_text();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered cooperative localization simulator"};
  app.set_version_flag("--version", etcl::kVersion);
  app.require_subcommand(1);

  CommonOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run a scenario");
  add_common(run, run_opt);

  CommonOptions sweep_opt;
  std::string axis;
  std::vector<double> values;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep delta or cp");
  add_common(sweep, sweep_opt);
  sweep->add_option("--axis", axis, "delta | cp")->required();
  sweep->add_option("--values", values, "axis values")->delimiter(',');

  CLI::App* fixtures = app.add_subcommand("fixtures", "bundled scenario configs");
  CLI::App* fixtures_list = fixtures->add_subcommand("list", "list names");
  std::string emit_name, emit_out;
  CLI::App* fixtures_emit =
      fixtures->add_subcommand("emit", "print a fixture config");
  fixtures_emit->add_option("name", emit_name, "fixture name")->required();
  fixtures_emit->add_option("--out", emit_out, "write to file instead");
  fixtures->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt, axis, values);
    if (fixtures->parsed()) {
      return cmd_fixtures(fixtures_list->parsed(), emit_name, emit_out);
    }
    return kExitConfig;
  } catch (const etcl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const etcl::BadSize& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const etcl::NumericalError& e) {
    std::cerr << "numerical failure at " << e.what() << "\n";
    return kExitNumerical;
  } catch (const etcl::Error& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aimdlab/errors.hpp"
#include "aimdlab/experiments.hpp"
#include "aimdlab/sync_model.hpp"

namespace aimdlab {

namespace {

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid value for " + flag + ": " + item);
    }
  }
  if (out.empty()) throw ConfigError(flag + " list must not be empty");
  return out;
}

std::vector<PolicyKind> parse_policy_list(const std::string& text) {
  std::vector<PolicyKind> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_policy_kind(item));
  if (out.empty()) throw ConfigError("policies list must not be empty");
  return out;
}

std::string default_out_dir() {
  const char* env = std::getenv("AIMDLAB_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "results";
}

std::string scenario_keys_help() {
  std::ostringstream out;
  out << "Scenario keys for config files and --set (defaults shown):\n";
  std::istringstream defaults(serialize_scenario(ScenarioConfig{}));
  std::string line;
  while (std::getline(defaults, line)) out << "  " << line << "\n";
  return out.str();
}

struct ExperimentArgs {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = default_out_dir();
  std::vector<std::string> overrides;
  std::string flows_csv;
  std::string policies_csv;  // exp1
  std::string policy;        // exp2/exp3
  double duration = -1;
  long long transfer = -2;
  long long seed = -1;
};

void add_common_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario config file (flat key = value)");
  cmd->add_option("--manifest", args.manifest_path,
                  "Manifest from a previous run; reproduces it exactly");
  cmd->add_option("--set", args.overrides, "Override one scenario key, as key=value")
      ->take_all();
  cmd->add_option("--out", args.out_dir,
                  "Output directory (default $AIMDLAB_OUT_DIR or ./results)");
  cmd->add_option("--seed", args.seed, "Run seed recorded in the manifest");
  cmd->add_option("--flows", args.flows_csv, "Comma list of flow counts to sweep");
}

ScenarioConfig resolve_scenario(const ExperimentArgs& args, const std::string& experiment_id,
                                std::vector<int>& flows, std::vector<PolicyKind>& policies) {
  ScenarioConfig cfg;
  if (!args.manifest_path.empty()) {
    ManifestData manifest = parse_manifest_file(args.manifest_path);
    if (manifest.experiment != experiment_id)
      throw ConfigError("manifest is for " + manifest.experiment + ", not " + experiment_id);
    cfg = manifest.scenario;
    if (!manifest.flows.empty()) flows = manifest.flows;
    if (!manifest.policies.empty()) policies = manifest.policies;
  }
  if (!args.config_path.empty()) cfg = parse_scenario_file(args.config_path, cfg);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.flows_csv.empty()) flows = parse_int_list(args.flows_csv, "--flows");
  if (!args.policies_csv.empty()) policies = parse_policy_list(args.policies_csv);
  if (!args.policy.empty()) {
    cfg.policy = parse_policy_kind(args.policy);
    policies = {cfg.policy};
  }
  if (args.duration > 0) cfg.sim_duration = args.duration;
  if (args.transfer >= -1) cfg.transfer_size = args.transfer;
  if (args.seed >= 0) cfg.seed = static_cast<unsigned long>(args.seed);
  validate_scenario(cfg);
  return cfg;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Deterministic AIMD / New-AIMD congestion-control laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.footer(scenario_keys_help());

  // sync
  auto* sync_cmd = app.add_subcommand(
      "sync", "Run the synchronous binary-feedback window model, CSV to stdout");
  long long sync_capacity = 24;
  std::string sync_x = "2,6";
  std::string sync_policy = "new-aimd";
  std::string sync_arith = "integer";
  int sync_max_cycles = 12;
  long long sync_alpha = 1;
  std::string sync_out;
  sync_cmd->add_option("--W", sync_capacity, "Aggregate capacity threshold, packets");
  sync_cmd->add_option("--x", sync_x, "Comma list of initial windows, one per flow");
  sync_cmd->add_option("--policy", sync_policy, "aimd or new-aimd");
  sync_cmd->add_option("--arithmetic", sync_arith,
                       "integer (whole steps) or rational (exact equality)");
  sync_cmd->add_option("--max-cycles", sync_max_cycles, "Cycles to record");
  sync_cmd->add_option("--alpha", sync_alpha, "Additive step per RTT, segments");
  sync_cmd->add_option("--out", sync_out, "Also write sync_cycles.csv to this directory");

  // experiment sweeps
  ExperimentArgs exp1_args, exp2_args, exp3_args;
  auto* exp1_cmd = app.add_subcommand(
      "exp1", "Timed transfer of a fixed byte total vs number of flows, both policies");
  add_common_options(exp1_cmd, exp1_args);
  exp1_cmd->add_option("--policies", exp1_args.policies_csv, "Comma list of policies to compare");
  exp1_cmd->add_option("--transfer-size", exp1_args.transfer, "Total bytes to transfer");

  auto* exp2_cmd =
      app.add_subcommand("exp2", "Queue length and per-RTT queuing delay series");
  add_common_options(exp2_cmd, exp2_args);
  exp2_cmd->add_option("--policy", exp2_args.policy, "aimd or new-aimd");
  exp2_cmd->add_option("--duration", exp2_args.duration, "Run length, seconds");

  auto* exp3_cmd =
      app.add_subcommand("exp3", "Per-second bottleneck utilization and warmup-trimmed average");
  add_common_options(exp3_cmd, exp3_args);
  exp3_cmd->add_option("--policy", exp3_args.policy, "aimd or new-aimd");
  exp3_cmd->add_option("--duration", exp3_args.duration, "Run length, seconds");

  // validate
  auto* validate_cmd = app.add_subcommand(
      "validate", "Randomized exact-arithmetic checks of the cycle algebra");
  int validate_count = 1000;
  long long validate_seed = 1;
  validate_cmd->add_option("--count", validate_count, "Number of randomized configurations");
  validate_cmd->add_option("--seed", validate_seed, "RNG seed");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ExtrasError& e) {
    // Name the first unrecognized token the way config errors do.
    std::string what = e.what();
    const auto dash = what.find("--");
    if (dash != std::string::npos) {
      std::string key = what.substr(dash + 2);
      const auto end = key.find_first_of(" \n\r");
      if (end != std::string::npos) key.erase(end);
      std::cerr << "unknown key: " << key << "\n";
    } else {
      std::cerr << what << "\n";
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (sync_cmd->parsed()) {
    SyncConfig cfg;
    cfg.capacity = sync_capacity;
    for (int x : parse_int_list(sync_x, "--x")) cfg.initial_windows.push_back(Rational(x));
    cfg.kind = parse_policy_kind(sync_policy);
    if (sync_arith == "integer")
      cfg.arithmetic = SyncArithmetic::Integer;
    else if (sync_arith == "rational")
      cfg.arithmetic = SyncArithmetic::Rational;
    else
      throw ConfigError("unknown arithmetic: " + sync_arith);
    cfg.max_cycles = sync_max_cycles;
    cfg.additive_step = sync_alpha;

    auto records = run_sync(cfg);
    auto analytics = analyze_epochs(cfg, records);
    write_cycles_csv(std::cout, records, &analytics);
    if (!sync_out.empty()) {
      std::filesystem::create_directories(sync_out);
      std::ofstream file(std::filesystem::path(sync_out) / "sync_cycles.csv");
      if (!file) throw ConfigError("cannot write file in: " + sync_out);
      write_cycles_csv(file, records, &analytics);
    }
    return 0;
  }

  if (exp1_cmd->parsed()) {
    std::vector<int> flows = {1, 2, 3, 4, 5};
    std::vector<PolicyKind> policies = {PolicyKind::Aimd, PolicyKind::NewAimd};
    ScenarioConfig cfg = resolve_scenario(exp1_args, "exp1", flows, policies);
    auto result = exp_transfer_time(cfg, flows, policies);
    emit_report(result, exp1_args.out_dir);
    std::cerr << "exp1: wrote " << exp1_args.out_dir << "\n";
    return 0;
  }
  if (exp2_cmd->parsed()) {
    std::vector<int> flows = {2, 3, 4, 5};
    std::vector<PolicyKind> policies;
    ScenarioConfig cfg = resolve_scenario(exp2_args, "exp2", flows, policies);
    if (!policies.empty()) cfg.policy = policies.front();
    auto result = exp_queue_delay(cfg, flows);
    emit_report(result, exp2_args.out_dir);
    std::cerr << "exp2: wrote " << exp2_args.out_dir << "\n";
    return 0;
  }
  if (exp3_cmd->parsed()) {
    std::vector<int> flows = {2, 3, 4, 5};
    std::vector<PolicyKind> policies;
    ScenarioConfig cfg = resolve_scenario(exp3_args, "exp3", flows, policies);
    if (!policies.empty()) cfg.policy = policies.front();
    auto result = exp_utilization(cfg, flows);
    emit_report(result, exp3_args.out_dir);
    std::cerr << "exp3: wrote " << exp3_args.out_dir << "\n";
    return 0;
  }
  if (validate_cmd->parsed()) {
    auto report = sync_validation_suite(validate_count, static_cast<unsigned>(validate_seed));
    std::cout << "cases: " << report.cases << "\n"
              << "cycle checks: " << report.cycle_checks << "\n"
              << "failures: " << report.failures << "\n"
              << "known case: " << (report.known_case_ok ? "ok" : "MISMATCH") << "\n";
    if (!report.passed()) {
      std::cout << "first counterexample: " << report.first_counterexample << "\n";
      std::cerr << "validation failed\n";
      return 2;
    }
    std::cout << "validation passed\n";
    return 0;
  }
  return 0;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  try {
    return run_cli(std::move(args));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc));
  for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(std::move(args));
}

}  // namespace aimdlab

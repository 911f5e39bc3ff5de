//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

#include "aimdlab/packet_sim.hpp"
#include "aimdlab/scenario.hpp"

namespace aimdlab {

inline constexpr const char* kToolVersion = "aimdlab 0.1.0";

struct ExperimentRow {
  PolicyKind policy = PolicyKind::NewAimd;
  int n_flows = 0;
  ScenarioResult result;
};

struct ExperimentResult {
  std::string id;  // exp1 | exp2 | exp3
  ScenarioConfig base;
  std::vector<int> flows;
  std::vector<PolicyKind> policies;
  std::vector<ExperimentRow> rows;  // sorted by (policy name, n_flows)
};

/// Timed transfer of a fixed byte total, swept over flow counts and policies.
ExperimentResult exp_transfer_time(const ScenarioConfig& base, std::vector<int> flows,
                                   std::vector<PolicyKind> policies);

/// Long-lived flows; queue-length and per-RTT queuing-delay series per flow count.
ExperimentResult exp_queue_delay(const ScenarioConfig& base, std::vector<int> flows);

/// Long-lived flows; per-second bottleneck utilization plus warmup-trimmed averages.
ExperimentResult exp_utilization(const ScenarioConfig& base, std::vector<int> flows);

/// Randomized exact-arithmetic checks of the cycle algebra against the
/// stepped model, plus the pinned known case.
struct ValidationReport {
  int cases = 0;
  int cycle_checks = 0;
  int failures = 0;
  bool known_case_ok = false;
  std::string first_counterexample;
  bool passed() const { return failures == 0 && known_case_ok; }
};

ValidationReport sync_validation_suite(int count, unsigned seed);

/// Writes the experiment's CSV files and a manifest that reproduces the run.
void emit_report(const ExperimentResult& result, const std::string& out_dir);

/// Manifest parsing: experiment id, sweep lists, and the scenario echo.
struct ManifestData {
  std::string experiment;
  std::vector<int> flows;
  std::vector<PolicyKind> policies;
  ScenarioConfig scenario;
};

ManifestData parse_manifest_file(const std::string& path);

}  // namespace aimdlab

//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "aimdlab/cli.hpp"
#include "aimdlab/errors.hpp"
#include "aimdlab/experiments.hpp"

using namespace aimdlab;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario config: parse, override, serialize round trip") {
  ScenarioConfig cfg;
  std::istringstream file(
      "# comment\n"
      "n_flows = 3\n"
      "policy = aimd\n"
      "link_bandwidth = 2.5e6\n"
      "transfer_size = 1000\n");
  cfg = parse_scenario_stream(file, cfg);
  CHECK(cfg.n_flows == 3);
  CHECK(cfg.policy == PolicyKind::Aimd);
  CHECK(cfg.link_bandwidth == 2.5e6);
  CHECK(cfg.transfer_size == 1000);

  apply_override(cfg, "queue_capacity", "50");
  CHECK(cfg.queue_capacity == 50);
  CHECK_THROWS_WITH_AS(apply_override(cfg, "foo", "1"), "unknown key: foo", ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "n_flows", "abc"), ConfigError);

  std::istringstream echoed(serialize_scenario(cfg));
  ScenarioConfig reparsed = parse_scenario_stream(echoed);
  CHECK(serialize_scenario(reparsed) == serialize_scenario(cfg));

  ScenarioConfig bad;
  bad.n_flows = 0;
  CHECK_THROWS_AS(validate_scenario(bad), ConfigError);
}

TEST_CASE("base RTT at defaults") {
  ScenarioConfig cfg;
  // 3 data hops (1.6 ms + 15 us) + 3 ack hops (64 us + 15 us).
  CHECK(base_rtt_s(cfg) == doctest::Approx(0.005082).epsilon(1e-9));
}

TEST_CASE("exp1 transfer sweep and CSV schema") {
  TempDir dir("aimdlab_exp1_test");
  ScenarioConfig base;
  base.transfer_size = 400'000;  // small enough for a quick unit run

  auto result = exp_transfer_time(base, {1, 2}, {PolicyKind::NewAimd, PolicyKind::Aimd});
  REQUIRE(result.rows.size() == 4);
  CHECK(result.rows[0].policy == PolicyKind::Aimd);   // sorted by policy name
  CHECK(result.rows[0].n_flows == 1);
  CHECK(result.rows[3].policy == PolicyKind::NewAimd);
  CHECK(result.rows[3].n_flows == 2);

  // Wire-time floor: 8 * bytes / bandwidth.
  for (const auto& row : result.rows)
    CHECK(row.result.report.completion_s >= 8.0 * 400'000 / 5e6);

  emit_report(result, dir.path.string());
  auto csv = slurp(dir.path / "transfer_times.csv");
  CHECK(first_line(csv) == "policy,n_flows,seconds,throughput_Bps");
  CHECK(csv.find("aimd,1,") != std::string::npos);
  CHECK(csv.find("new-aimd,2,") != std::string::npos);

  CHECK_THROWS_AS(exp_transfer_time(base, {}, {PolicyKind::Aimd}), ConfigError);
  CHECK_THROWS_AS(exp_transfer_time(base, {1}, {}), ConfigError);
}

TEST_CASE("exp2 queue and delay series") {
  TempDir dir("aimdlab_exp2_test");
  ScenarioConfig base;
  base.sim_duration = 3.0;

  auto result = exp_queue_delay(base, {2});
  REQUIRE(result.rows.size() == 1);
  const auto& report = result.rows[0].result.report;
  CHECK(!report.queue_series.empty());
  CHECK(report.queue_series.front().time_s == 0.0);
  CHECK(report.queue_series.front().packets == 0);  // nothing reaches the bottleneck at t=0
  for (const auto& s : report.queue_series) CHECK(s.packets <= base.queue_capacity);

  emit_report(result, dir.path.string());
  CHECK(first_line(slurp(dir.path / "queue_series.csv")) ==
        "time_s,n_flows,queue_packets,queue_bytes");
  CHECK(first_line(slurp(dir.path / "delay_per_rtt.csv")) ==
        "rtt_bucket,n_flows,avg_queuing_delay_ms");
}

TEST_CASE("exp3 utilization summary and manifest round trip") {
  TempDir dir("aimdlab_exp3_test");
  TempDir rerun_dir("aimdlab_exp3_rerun");
  ScenarioConfig base;
  base.sim_duration = 7.0;

  auto result = exp_utilization(base, {2});
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].result.report.avg_utilization_after_warmup > 0.0);
  emit_report(result, dir.path.string());

  CHECK(first_line(slurp(dir.path / "utilization_per_second.csv")) == "time_s,n_flows,rho");
  CHECK(first_line(slurp(dir.path / "utilization_summary.csv")) == "n_flows,avg_rho_after_5s");
  auto summary = slurp(dir.path / "summary.txt");
  CHECK(summary.find("new-aimd.2.avg_rho_after_5s = ") != std::string::npos);
  CHECK(summary.find("new-aimd.2.queuing_delay_max_ms = ") != std::string::npos);

  // The manifest reproduces the run byte for byte.
  auto manifest = parse_manifest_file((dir.path / "manifest.txt").string());
  CHECK(manifest.experiment == "exp3");
  CHECK(manifest.flows == std::vector<int>{2});
  auto rerun = exp_utilization(manifest.scenario, manifest.flows);
  emit_report(rerun, rerun_dir.path.string());
  CHECK(slurp(dir.path / "utilization_per_second.csv") ==
        slurp(rerun_dir.path / "utilization_per_second.csv"));
  CHECK(slurp(dir.path / "utilization_summary.csv") ==
        slurp(rerun_dir.path / "utilization_summary.csv"));

  ScenarioConfig shallow;
  shallow.sim_duration = 4.0;  // cannot cover the 5 s warmup
  CHECK_THROWS_AS(exp_utilization(shallow, {2}), ConfigError);
}

TEST_CASE("validation suite catches nothing on a healthy build") {
  auto report = sync_validation_suite(50, 3);
  CHECK(report.cases == 50);
  CHECK(report.failures == 0);
  CHECK(report.known_case_ok);
  CHECK(report.passed());
  CHECK_THROWS_AS(sync_validation_suite(0, 1), ConfigError);
}

TEST_CASE("cli exit codes") {
  TempDir dir("aimdlab_cli_test");
  CHECK(cli_main({"aimdlab", "sync", "--W", "24", "--x", "2,6"}) == 0);
  CHECK(cli_main({"aimdlab", "exp3", "--foo"}) == 1);
  CHECK(cli_main({"aimdlab", "sync", "--W", "4", "--x", "2,6"}) == 1);  // capacity too small
  CHECK(cli_main({"aimdlab", "validate", "--count", "5"}) == 0);
  CHECK(cli_main({"aimdlab", "exp3", "--flows", "2", "--set", "sim_duration=6",
                  "--out", (dir.path / "out").string()}) == 0);
  CHECK(cli_main({"aimdlab", "exp3", "--set", "nonsense=1"}) == 1);
  CHECK(cli_main({"aimdlab", "--version"}) == 0);
}

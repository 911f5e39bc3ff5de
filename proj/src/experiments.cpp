//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "aimdlab/errors.hpp"
#include "aimdlab/metrics.hpp"
#include "aimdlab/sync_model.hpp"

namespace aimdlab {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void sort_policies(std::vector<PolicyKind>& policies) {
  std::sort(policies.begin(), policies.end(), [](PolicyKind a, PolicyKind b) {
    return std::string(to_string(a)) < std::string(to_string(b));
  });
  policies.erase(std::unique(policies.begin(), policies.end()), policies.end());
}

void check_sweeps(const std::vector<int>& flows, const std::vector<PolicyKind>& policies) {
  if (flows.empty()) throw ConfigError("flows list must not be empty");
  if (policies.empty()) throw ConfigError("policies list must not be empty");
  for (int n : flows)
    if (n < 1) throw ConfigError("n_flows must be >= 1");
}

ExperimentResult run_sweep(std::string id, const ScenarioConfig& base, std::vector<int> flows,
                           std::vector<PolicyKind> policies) {
  std::sort(flows.begin(), flows.end());
  flows.erase(std::unique(flows.begin(), flows.end()), flows.end());
  sort_policies(policies);
  check_sweeps(flows, policies);

  ExperimentResult result;
  result.id = std::move(id);
  result.base = base;
  result.flows = flows;
  result.policies = policies;
  for (PolicyKind policy : policies) {
    for (int n : flows) {
      ScenarioConfig cfg = base;
      cfg.policy = policy;
      cfg.n_flows = n;
      ExperimentRow row;
      row.policy = policy;
      row.n_flows = n;
      row.result = run_scenario(cfg);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << values[i];
  }
  return out.str();
}

std::string join_policies(const std::vector<PolicyKind>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << to_string(values[i]);
  }
  return out.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ExperimentResult exp_transfer_time(const ScenarioConfig& base, std::vector<int> flows,
                                   std::vector<PolicyKind> policies) {
  ScenarioConfig cfg = base;
  if (cfg.transfer_size < 0) cfg.transfer_size = 20'480'000;  // 20000 KB
  return run_sweep("exp1", cfg, std::move(flows), std::move(policies));
}

ExperimentResult exp_queue_delay(const ScenarioConfig& base, std::vector<int> flows) {
  ScenarioConfig cfg = base;
  cfg.transfer_size = -1;
  return run_sweep("exp2", cfg, std::move(flows), {cfg.policy});
}

ExperimentResult exp_utilization(const ScenarioConfig& base, std::vector<int> flows) {
  ScenarioConfig cfg = base;
  cfg.transfer_size = -1;
  if (cfg.sim_duration < 6.0)
    throw ConfigError("sim_duration must cover the 5 s warmup plus a measurement window");
  return run_sweep("exp3", cfg, std::move(flows), {cfg.policy});
}

ValidationReport sync_validation_suite(int count, unsigned seed) {
  if (count < 1) throw ConfigError("count must be >= 1");
  ValidationReport report;
  std::mt19937 rng(seed);
  // Log-uniform capacities cover every magnitude up to the 1e4 bound; every
  // 50th case pins the bound itself.
  std::uniform_real_distribution<double> log_capacity(std::log(8.0), std::log(10000.0));
  std::uniform_real_distribution<double> split_dist(0.0, 1.0);

  auto record_failure = [&report](const std::string& text) {
    ++report.failures;
    if (report.first_counterexample.empty()) report.first_counterexample = text;
  };

  for (int i = 0; i < count; ++i) {
    // Aggregate start 2..W-2 with (W - sum) even; x1 < x2 by construction.
    long capacity =
        i % 50 == 0 ? 10000 : std::max(8L, std::lround(std::exp(log_capacity(rng))));
    long max_sum = capacity - 2;
    std::uniform_int_distribution<long> sum_dist(2, max_sum);
    long x_sum = sum_dist(rng);
    if ((capacity - x_sum) % 2 != 0) x_sum = x_sum > 2 ? x_sum - 1 : x_sum + 1;
    long x1 = 1 + static_cast<long>(split_dist(rng) * static_cast<double>((x_sum - 1) / 2));
    x1 = std::max(1L, std::min(x1, x_sum - 1));
    long x2 = x_sum - x1;

    SyncConfig cfg;
    cfg.capacity = capacity;
    cfg.initial_windows = {Rational(x1), Rational(x2)};
    cfg.kind = PolicyKind::NewAimd;
    cfg.arithmetic = SyncArithmetic::Rational;
    cfg.max_cycles = 6;

    std::ostringstream label;
    label << "W=" << capacity << " x=[" << x1 << "," << x2 << "]";

    std::vector<CycleRecord> records;
    try {
      records = run_sync(cfg);
    } catch (const std::exception& e) {
      record_failure(label.str() + " run failed: " + e.what());
      continue;
    }
    ++report.cases;

    const Rational k1 = records[0].steps;
    std::vector<Rational> expected;
    try {
      expected = closed_form_ks(cfg.capacity, k1, cfg.max_cycles);
    } catch (const std::exception& e) {
      record_failure(label.str() + " closed form unavailable: " + e.what());
      continue;
    }
    for (std::size_t c = 0; c < records.size(); ++c) {
      ++report.cycle_checks;
      const auto& rec = records[c];
      if (!rec.exact_capacity_hit) {
        record_failure(label.str() + " cycle " + std::to_string(c + 1) +
                       " missed capacity equality");
        break;
      }
      if (rec.steps != expected[c]) {
        record_failure(label.str() + " cycle " + std::to_string(c + 1) + " k mismatch");
        break;
      }
      if (rec.packets_sent != cycle_packet_total(cfg.capacity, rec.steps)) {
        record_failure(label.str() + " cycle " + std::to_string(c + 1) + " total mismatch");
        break;
      }
      if (c >= 2 && records[c].steps * 2 != records[c - 1].steps) {
        record_failure(label.str() + " cycle " + std::to_string(c + 1) + " halving broken");
        break;
      }
    }
  }

  // Pinned known case: W=24, x=[2,6].
  {
    SyncConfig cfg;
    cfg.capacity = 24;
    cfg.initial_windows = {2, 6};
    cfg.kind = PolicyKind::NewAimd;
    cfg.arithmetic = SyncArithmetic::Integer;
    cfg.max_cycles = 3;
    auto records = run_sync(cfg);
    bool ok = records.size() == 3 && records[0].steps == 8 && records[1].steps == 2 &&
              records[2].steps == 1 && records[0].packets_sent == 144 &&
              records[1].packets_sent == 66;
    cfg.kind = PolicyKind::Aimd;
    cfg.max_cycles = 2;
    auto aimd = run_sync(cfg);
    ok = ok && aimd.size() == 2 && aimd[0].steps == 8 && aimd[1].steps == 6;
    report.known_case_ok = ok;
    if (!ok) record_failure("known case (W=24, x=[2,6]) mismatch");
  }
  return report;
}

void emit_report(const ExperimentResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);
  const fs::path dir(out_dir);

  if (result.id == "exp1") {
    auto out = open_csv(dir / "transfer_times.csv");
    out << "policy,n_flows,seconds,throughput_Bps\n";
    for (const auto& row : result.rows) {
      const double seconds = row.result.report.completion_s;
      double total_bytes = 0;
      for (const auto& t : row.result.report.per_flow) total_bytes += t.file_bytes;
      const double rate = seconds > 0 ? throughput(total_bytes, seconds) : 0.0;
      out << to_string(row.policy) << ',' << row.n_flows << ',' << format_double(seconds) << ','
          << format_double(rate) << '\n';
    }
  } else if (result.id == "exp2") {
    auto queues = open_csv(dir / "queue_series.csv");
    queues << "time_s,n_flows,queue_packets,queue_bytes\n";
    for (const auto& row : result.rows)
      for (const auto& s : row.result.report.queue_series)
        queues << format_double(s.time_s) << ',' << row.n_flows << ',' << s.packets << ','
               << s.bytes << '\n';

    auto delays = open_csv(dir / "delay_per_rtt.csv");
    delays << "rtt_bucket,n_flows,avg_queuing_delay_ms\n";
    for (const auto& row : result.rows) {
      const auto& buckets = row.result.report.delays.per_rtt;
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (buckets[b].count == 0) continue;
        delays << b << ',' << row.n_flows << ',' << format_double(buckets[b].mean_s() * 1e3)
               << '\n';
      }
    }
  } else if (result.id == "exp3") {
    auto series = open_csv(dir / "utilization_per_second.csv");
    series << "time_s,n_flows,rho\n";
    for (const auto& row : result.rows)
      for (const auto& s : row.result.report.utilization)
        series << format_double(s.interval_start_s) << ',' << row.n_flows << ','
               << format_double(s.rho) << '\n';

    auto summary = open_csv(dir / "utilization_summary.csv");
    summary << "n_flows,avg_rho_after_5s\n";
    for (const auto& row : result.rows)
      summary << row.n_flows << ','
              << format_double(row.result.report.avg_utilization_after_warmup) << '\n';
  } else {
    throw ConfigError("unknown experiment id: " + result.id);
  }

  // Flat per-run key = value digest of every SummaryReport.
  auto summary = open_csv(dir / "summary.txt");
  for (const auto& row : result.rows) {
    const auto& report = row.result.report;
    std::string prefix = std::string(to_string(row.policy)) + "." +
                         std::to_string(row.n_flows) + ".";
    double total_bytes = 0;
    for (const auto& t : report.per_flow) total_bytes += t.file_bytes;
    summary << prefix << "completion_s = " << format_double(report.completion_s) << "\n";
    summary << prefix << "delivered_bytes = " << format_double(total_bytes) << "\n";
    summary << prefix << "jain_index = " << format_double(report.jain) << "\n";
    if (std::isfinite(report.avg_utilization_after_warmup))
      summary << prefix
              << "avg_rho_after_5s = " << format_double(report.avg_utilization_after_warmup)
              << "\n";
    summary << prefix << "queuing_delay_mean_ms = "
            << format_double(report.delays.queue_mean_s() * 1e3) << "\n";
    summary << prefix << "queuing_delay_max_ms = "
            << format_double(report.delays.queue_max_s * 1e3) << "\n";
    summary << prefix << "e2e_delay_mean_ms = "
            << format_double(report.delays.e2e_mean_s() * 1e3) << "\n";
    summary << prefix << "drops_bottleneck = " << report.bottleneck_drops << "\n";
    summary << prefix << "drops_total = " << report.total_drops << "\n";
  }

  auto manifest = open_csv(dir / "manifest.txt");
  manifest << "# " << kToolVersion << " run manifest; rerun with --manifest <this file>\n";
  manifest << "experiment = " << result.id << "\n";
  manifest << "flows = " << join_ints(result.flows) << "\n";
  manifest << "policies = " << join_policies(result.policies) << "\n";
  manifest << serialize_scenario(result.base);
}

ManifestData parse_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest file: " + path);
  ManifestData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r\n");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("manifest line " + std::to_string(line_no) + " is not key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    key = trim(key);
    value = trim(value);
    if (key == "experiment") {
      data.experiment = value;
    } else if (key == "flows") {
      for (const auto& item : split_list(value)) data.flows.push_back(std::stoi(item));
    } else if (key == "policies") {
      for (const auto& item : split_list(value)) data.policies.push_back(parse_policy_kind(item));
    } else {
      apply_override(data.scenario, key, value);
    }
  }
  if (data.experiment.empty()) throw ConfigError("manifest missing the experiment key");
  return data;
}

}  // namespace aimdlab

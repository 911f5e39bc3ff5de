//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <string>

#include "aimdlab/policy.hpp"

namespace aimdlab {

/// Declarative dumbbell scenario. Every field doubles as a config-file key;
/// unknown keys are rejected.
struct ScenarioConfig {
  int n_flows = 2;
  PolicyKind policy = PolicyKind::NewAimd;
  double link_bandwidth = 5e6;        // bits/s, senders, receivers and bottleneck alike
  int queue_capacity = 100;           // packets, every drop-tail queue
  double link_distance = 3000;        // meters per link
  double propagation_speed = 2e8;     // m/s
  int mss = 1000;                     // data packet bytes on the wire
  int ack_bytes = 40;
  long long transfer_size = -1;       // bytes; negative = long-lived flows for sim_duration
  bool per_flow_transfer = false;     // transfer_size per flow instead of split total
  double sim_duration = 30.0;         // seconds, long-lived mode horizon
  unsigned long seed = 1;             // recorded for reproducibility
  double sample_interval = 0;         // queue sampling period, seconds; 0 = one base RTT
  double initial_window = 1.0;        // segments
  double additive_step = 1.0;         // segments per RTT
  double max_sim_time = 600.0;        // hard stop for transfer mode, seconds
  std::string trace_path;             // per-event CSV; empty = off
};

void validate_scenario(const ScenarioConfig& cfg);

/// Applies one `key = value` override. Unknown key -> ConfigError("unknown key: ...").
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` file; '#' starts a comment. Keys must match field names.
ScenarioConfig parse_scenario_stream(std::istream& in, ScenarioConfig base = {});
ScenarioConfig parse_scenario_file(const std::string& path, ScenarioConfig base = {});

/// Echoes every field in a fixed order, parseable by parse_scenario_stream.
std::string serialize_scenario(const ScenarioConfig& cfg);

double data_serialization_s(const ScenarioConfig& cfg);
double propagation_delay_s(const ScenarioConfig& cfg);

/// Unloaded RTT: three store-and-forward data hops out, three ACK hops back.
double base_rtt_s(const ScenarioConfig& cfg);

}  // namespace aimdlab

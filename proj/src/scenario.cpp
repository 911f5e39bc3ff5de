//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aimdlab/errors.hpp"

namespace aimdlab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for key " + key + ": " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for key " + key + ": " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid value for key " + key + ": " + value);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"n_flows",
       [](ScenarioConfig& c, const std::string& v) {
         c.n_flows = static_cast<int>(parse_int("n_flows", v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.n_flows); }},
      {"policy",
       [](ScenarioConfig& c, const std::string& v) { c.policy = parse_policy_kind(v); },
       [](const ScenarioConfig& c) { return std::string(to_string(c.policy)); }},
      {"link_bandwidth",
       [](ScenarioConfig& c, const std::string& v) {
         c.link_bandwidth = parse_double("link_bandwidth", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.link_bandwidth); }},
      {"queue_capacity",
       [](ScenarioConfig& c, const std::string& v) {
         c.queue_capacity = static_cast<int>(parse_int("queue_capacity", v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.queue_capacity); }},
      {"link_distance",
       [](ScenarioConfig& c, const std::string& v) {
         c.link_distance = parse_double("link_distance", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.link_distance); }},
      {"propagation_speed",
       [](ScenarioConfig& c, const std::string& v) {
         c.propagation_speed = parse_double("propagation_speed", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.propagation_speed); }},
      {"mss",
       [](ScenarioConfig& c, const std::string& v) {
         c.mss = static_cast<int>(parse_int("mss", v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.mss); }},
      {"ack_bytes",
       [](ScenarioConfig& c, const std::string& v) {
         c.ack_bytes = static_cast<int>(parse_int("ack_bytes", v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.ack_bytes); }},
      {"transfer_size",
       [](ScenarioConfig& c, const std::string& v) {
         c.transfer_size = parse_int("transfer_size", v);
       },
       [](const ScenarioConfig& c) { return std::to_string(c.transfer_size); }},
      {"per_flow_transfer",
       [](ScenarioConfig& c, const std::string& v) {
         c.per_flow_transfer = parse_bool("per_flow_transfer", v);
       },
       [](const ScenarioConfig& c) { return std::string(c.per_flow_transfer ? "true" : "false"); }},
      {"sim_duration",
       [](ScenarioConfig& c, const std::string& v) {
         c.sim_duration = parse_double("sim_duration", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.sim_duration); }},
      {"seed",
       [](ScenarioConfig& c, const std::string& v) {
         c.seed = static_cast<unsigned long>(parse_int("seed", v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      {"sample_interval",
       [](ScenarioConfig& c, const std::string& v) {
         c.sample_interval = parse_double("sample_interval", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.sample_interval); }},
      {"initial_window",
       [](ScenarioConfig& c, const std::string& v) {
         c.initial_window = parse_double("initial_window", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.initial_window); }},
      {"additive_step",
       [](ScenarioConfig& c, const std::string& v) {
         c.additive_step = parse_double("additive_step", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.additive_step); }},
      {"max_sim_time",
       [](ScenarioConfig& c, const std::string& v) {
         c.max_sim_time = parse_double("max_sim_time", v);
       },
       [](const ScenarioConfig& c) { return format_number(c.max_sim_time); }},
      {"trace_path",
       [](ScenarioConfig& c, const std::string& v) { c.trace_path = v; },
       [](const ScenarioConfig& c) { return c.trace_path; }},
  };
  return table;
}

}  // namespace

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.n_flows < 1) throw ConfigError("n_flows must be >= 1");
  if (!(cfg.link_bandwidth > 0)) throw ConfigError("link_bandwidth must be > 0");
  if (cfg.queue_capacity < 1) throw ConfigError("queue_capacity must be >= 1");
  if (cfg.link_distance < 0) throw ConfigError("link_distance must be >= 0");
  if (!(cfg.propagation_speed > 0)) throw ConfigError("propagation_speed must be > 0");
  if (cfg.mss < 1) throw ConfigError("mss must be >= 1");
  if (cfg.ack_bytes < 1) throw ConfigError("ack_bytes must be >= 1");
  if (cfg.transfer_size < -1) throw ConfigError("transfer_size must be >= 0, or -1 for long-lived flows");
  if (!(cfg.sim_duration > 0)) throw ConfigError("sim_duration must be > 0");
  if (cfg.sample_interval < 0) throw ConfigError("sample_interval must be >= 0");
  if (!(cfg.initial_window >= 1)) throw ConfigError("initial_window must be >= 1");
  if (!(cfg.additive_step > 0)) throw ConfigError("additive_step must be > 0");
  if (!(cfg.max_sim_time > 0)) throw ConfigError("max_sim_time must be > 0");
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& field : fields()) {
    if (key == field.key) {
      field.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key: " + key);
}

ScenarioConfig parse_scenario_stream(std::istream& in, ScenarioConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not key = value: " + line);
    apply_override(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ScenarioConfig parse_scenario_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_scenario_stream(in, std::move(base));
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream out;
  for (const auto& field : fields()) out << field.key << " = " << field.get(cfg) << "\n";
  return out.str();
}

double data_serialization_s(const ScenarioConfig& cfg) {
  return static_cast<double>(cfg.mss) * 8.0 / cfg.link_bandwidth;
}

double propagation_delay_s(const ScenarioConfig& cfg) {
  return cfg.link_distance / cfg.propagation_speed;
}

double base_rtt_s(const ScenarioConfig& cfg) {
  const double prop = propagation_delay_s(cfg);
  const double data = data_serialization_s(cfg);
  const double ack = static_cast<double>(cfg.ack_bytes) * 8.0 / cfg.link_bandwidth;
  return 3.0 * (data + prop) + 3.0 * (ack + prop);
}

}  // namespace aimdlab

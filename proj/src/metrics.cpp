//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "aimdlab/errors.hpp"

namespace aimdlab {

void DelayStats::add_queue_sample(double at_s, double delay_s) {
  if (delay_s < 0) throw SimError("negative queuing delay sample");
  ++queue_count;
  queue_sum_s += delay_s;
  queue_max_s = std::max(queue_max_s, delay_s);
  if (bucket_width_s > 0) {
    auto bucket = static_cast<std::size_t>(at_s / bucket_width_s);
    if (per_rtt.size() <= bucket) per_rtt.resize(bucket + 1);
    per_rtt[bucket].sum_s += delay_s;
    ++per_rtt[bucket].count;
  }
}

void DelayStats::add_e2e_sample(double delay_s) {
  if (delay_s < 0) throw SimError("negative end-to-end delay sample");
  ++e2e_count;
  e2e_sum_s += delay_s;
  e2e_max_s = std::max(e2e_max_s, delay_s);
}

double throughput(double file_bytes, double duration_s) {
  if (file_bytes < 0) throw ConfigError("file size must be >= 0");
  if (!(duration_s > 0)) throw ConfigError("duration must be > 0");
  return file_bytes / duration_s;
}

UtilizationValue utilization(double rate_bits_per_s, double bandwidth_bits_per_s) {
  if (!(bandwidth_bits_per_s > 0)) throw ConfigError("bandwidth must be > 0");
  if (rate_bits_per_s < 0) throw ConfigError("rate must be >= 0");
  UtilizationValue v;
  double rho = rate_bits_per_s / bandwidth_bits_per_s;
  v.overflow = rho > 1.0;
  v.rho = std::min(rho, 1.0);
  return v;
}

std::vector<UtilSample> per_second_utilization(const std::vector<double>& bits_per_bin,
                                               double bandwidth_bits_per_s) {
  std::vector<UtilSample> samples;
  samples.reserve(bits_per_bin.size());
  for (std::size_t i = 0; i < bits_per_bin.size(); ++i) {
    UtilSample s;
    s.interval_start_s = static_cast<double>(i);
    s.bits = bits_per_bin[i];
    s.rho = utilization(bits_per_bin[i], bandwidth_bits_per_s).rho;
    samples.push_back(s);
  }
  return samples;
}

double warmup_average(const std::vector<UtilSample>& samples, double warmup_s) {
  if (samples.empty() || samples.back().interval_start_s < warmup_s)
    throw ConfigError("utilization series shorter than the warmup window");
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.interval_start_s >= warmup_s) {
      sum += s.rho;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

double jain_index(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("values must not be empty");
  double total = 0;
  double square_sum = 0;
  for (double v : values) {
    if (v < 0) throw ConfigError("values must be non-negative");
    total += v;
    square_sum += v * v;
  }
  if (square_sum == 0) throw ConfigError("all-zero values");
  return total * total / (static_cast<double>(values.size()) * square_sum);
}

}  // namespace aimdlab

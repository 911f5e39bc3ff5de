//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

namespace aimdlab {

/// Completed transfer: throughput r = bytes / duration.
struct TransferSummary {
  double file_bytes = 0;
  double duration_s = 0;
  double throughput_Bps = 0;
};

/// One measurement bin of bottleneck utilization, rho = rate / bandwidth.
struct UtilSample {
  double interval_start_s = 0;
  double bits = 0;
  double rho = 0;
};

struct UtilizationValue {
  double rho = 0;
  bool overflow = false;  // measured rate exceeded bandwidth: upstream accounting error
};

struct QueueSample {
  double time_s = 0;
  int packets = 0;
  std::int64_t bytes = 0;
};

struct DelayBucket {
  double sum_s = 0;
  std::uint64_t count = 0;
  double mean_s() const { return count == 0 ? 0.0 : sum_s / static_cast<double>(count); }
};

/// Queuing delay (enqueue to dequeue-for-transmission, head-of-line wait
/// only) and end-to-end delay aggregates. Queuing delays are additionally
/// bucketed by base-RTT intervals for per-RTT series output.
struct DelayStats {
  std::uint64_t queue_count = 0;
  double queue_sum_s = 0;
  double queue_max_s = 0;
  std::uint64_t e2e_count = 0;
  double e2e_sum_s = 0;
  double e2e_max_s = 0;
  double bucket_width_s = 0;
  std::vector<DelayBucket> per_rtt;

  void add_queue_sample(double at_s, double delay_s);
  void add_e2e_sample(double delay_s);
  double queue_mean_s() const { return queue_count == 0 ? 0.0 : queue_sum_s / queue_count; }
  double e2e_mean_s() const { return e2e_count == 0 ? 0.0 : e2e_sum_s / e2e_count; }
};

/// Everything measured in one scenario run.
struct SummaryReport {
  std::vector<TransferSummary> per_flow;
  std::vector<UtilSample> utilization;       // one sample per second
  double avg_utilization_after_warmup = 0;   // mean of samples starting at >= 5 s
  bool utilization_overflow = false;
  std::vector<QueueSample> queue_series;     // bottleneck forward queue
  DelayStats delays;
  double jain = 1.0;                         // over per-flow throughput
  std::uint64_t bottleneck_drops = 0;
  std::uint64_t total_drops = 0;
  double completion_s = 0;                   // last transfer finish, or the horizon
  std::uint64_t bottleneck_forward_bytes = 0;
};

double throughput(double file_bytes, double duration_s);
UtilizationValue utilization(double rate_bits_per_s, double bandwidth_bits_per_s);
std::vector<UtilSample> per_second_utilization(const std::vector<double>& bits_per_bin,
                                               double bandwidth_bits_per_s);
double warmup_average(const std::vector<UtilSample>& samples, double warmup_s = 5.0);
double jain_index(const std::vector<double>& values);

}  // namespace aimdlab

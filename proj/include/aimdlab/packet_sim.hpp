//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "aimdlab/metrics.hpp"
#include "aimdlab/scenario.hpp"

namespace aimdlab {

/// Simulation clock in integer picoseconds. Integer time plus a monotone
/// event counter makes runs bit-reproducible; at 5 Mbps one bit is exactly
/// 200000 ps.
using SimTime = std::int64_t;

constexpr SimTime kPicosecondsPerSecond = 1'000'000'000'000LL;

inline double to_seconds(SimTime t) {
  return static_cast<double>(t) / static_cast<double>(kPicosecondsPerSecond);
}

SimTime seconds_to_simtime(double seconds);

/// Store-and-forward serialization time: size * 8 / bandwidth.
double serialize_delay(std::int64_t size_bytes, double bandwidth_bits_per_s);
SimTime serialize_delay_ps(std::int64_t size_bytes, double bandwidth_bits_per_s);

enum class PacketKind { Data, Ack };

struct SackRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;  // inclusive
};

struct Packet {
  int flow = -1;
  std::uint64_t seq = 0;  // 1-based segment index; ACKs echo it as 0
  std::int64_t size_bytes = 0;
  PacketKind kind = PacketKind::Data;
  bool retransmit = false;
  SimTime ts_sent = -1;
  SimTime ts_enqueued = -1;
  SimTime ts_dequeued = -1;
  SimTime ts_delivered = -1;
  std::uint64_t cum_ack = 0;                // ACK only
  std::array<SackRange, 3> sack{};          // ACK only, lowest ranges first
  int sack_count = 0;
};

enum class EnqueueResult { Accepted, Dropped };

/// FIFO queue that discards arrivals when full.
class DropTailQueue {
 public:
  explicit DropTailQueue(int capacity_packets);

  EnqueueResult enqueue(Packet p, SimTime now);
  Packet dequeue(SimTime now);
  bool empty() const { return fifo_.empty(); }
  int capacity() const { return capacity_; }
  int occupancy_packets() const { return static_cast<int>(fifo_.size()); }
  std::int64_t occupancy_bytes() const { return occupancy_bytes_; }
  std::uint64_t enqueued() const { return enqueued_; }
  std::uint64_t dequeued() const { return dequeued_; }
  std::uint64_t dropped() const { return dropped_; }
  bool conserved() const {
    return enqueued_ == dequeued_ + dropped_ + static_cast<std::uint64_t>(fifo_.size());
  }

 private:
  int capacity_;
  std::deque<Packet> fifo_;
  std::int64_t occupancy_bytes_ = 0;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dequeued_ = 0;
  std::uint64_t dropped_ = 0;
};

/// Smoothed RTT estimator with exponential retransmission backoff.
/// rto = srtt + 4 * rttvar, floored at 200 ms and capped at 60 s.
class RttEstimator {
 public:
  void add_sample(SimTime rtt);
  void backoff();
  SimTime rto() const { return current_rto_; }
  bool has_sample() const { return srtt_ >= 0; }
  SimTime srtt() const { return srtt_; }
  SimTime rttvar() const { return rttvar_; }

  static constexpr SimTime kMinRto = 200LL * 1'000'000'000;      // 200 ms
  static constexpr SimTime kMaxRto = 60LL * 1'000'000'000'000;   // 60 s

 private:
  SimTime srtt_ = -1;
  SimTime rttvar_ = 0;
  SimTime current_rto_ = kMinRto;
};

struct DirectedLink {
  int id = -1;
  int src_node = -1;
  int dst_node = -1;
  bool forward = false;             // carries data toward the receivers
  bool bottleneck_forward = false;  // the measured direction of the shared link
};

/// N senders -> R1 -> (bottleneck) -> R2 -> N receivers; every duplex link
/// is a pair of directed channels, each with its own drop-tail queue.
struct DumbbellTopology {
  int n_flows = 0;
  int node_count = 0;
  int duplex_link_count = 0;
  std::vector<DirectedLink> links;

  int sender_node(int flow) const { return flow; }
  int router_in() const { return n_flows; }       // R1
  int router_out() const { return n_flows + 1; }  // R2
  int receiver_node(int flow) const { return n_flows + 2 + flow; }

  int uplink(int flow) const { return flow; }                       // sender -> R1
  int bottleneck_fwd() const { return n_flows; }                    // R1 -> R2
  int downlink(int flow) const { return n_flows + 1 + flow; }       // R2 -> receiver
  int uplink_rev(int flow) const { return 2 * n_flows + 1 + flow; } // receiver -> R2
  int bottleneck_rev() const { return 3 * n_flows + 1; }            // R2 -> R1
  int downlink_rev(int flow) const { return 3 * n_flows + 2 + flow; } // R1 -> sender
};

DumbbellTopology build_dumbbell(const ScenarioConfig& cfg);

enum class EventKind { LinkArrival, TransmitComplete, TimerExpiry, AppSend, Sample };

/// Per-flow transport counters surfaced for tests and reports.
struct FlowCounters {
  std::uint64_t segments_total = 0;
  std::int64_t bytes_total = 0;
  std::uint64_t data_sent_new = 0;
  std::uint64_t data_retransmits = 0;
  std::uint64_t recovery_episodes = 0;
  std::uint64_t rto_events = 0;
  std::uint64_t loss_events = 0;           // policy decreases
  std::uint64_t delivered_segments = 0;    // in-order app deliveries
  std::uint64_t duplicate_data = 0;        // received below/at cum or already buffered
  double final_cwnd = 0;
  SimTime final_rto = 0;
  SimTime finish_time = -1;                // last byte delivered; -1 if unfinished
};

struct QueueCounters {
  int link_id = -1;
  std::uint64_t enqueued = 0;
  std::uint64_t dequeued = 0;
  std::uint64_t dropped = 0;
  int occupancy = 0;
  bool conserved = false;
};

struct ScenarioResult {
  SummaryReport report;
  std::vector<FlowCounters> flows;
  std::vector<QueueCounters> queues;
  std::uint64_t events_processed = 0;
};

/// Runs the deterministic event loop until all transfers complete
/// (transfer mode) or the horizon is reached (long-lived mode).
ScenarioResult run_scenario(const ScenarioConfig& cfg);

}  // namespace aimdlab

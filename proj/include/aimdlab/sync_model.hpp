//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <vector>

#include "aimdlab/policy.hpp"
#include "aimdlab/rational.hpp"

namespace aimdlab {

enum class SyncArithmetic {
  Integer,   // whole RTT steps; the congestion RTT may overshoot capacity
  Rational,  // exact fractional final step so every cycle ends at z == W
};

/// One synchronous binary-feedback system: m users, each adding alpha
/// segments per RTT, with a shared capacity threshold that triggers a
/// simultaneous decrease.
struct SyncConfig {
  Rational capacity = 24;                  // W: aggregate threshold, packets
  std::vector<Rational> initial_windows;   // x_i, one entry per user
  PolicyKind kind = PolicyKind::NewAimd;
  SyncArithmetic arithmetic = SyncArithmetic::Integer;
  int max_cycles = 12;
  Rational additive_step = 1;              // alpha
};

/// One cycle: from the RTT after a decrease up to and including the RTT
/// whose aggregate reaches the threshold.
struct CycleRecord {
  int cycle_index = 0;                      // 1-based
  Rational steps;                           // k_c: increase steps in the cycle
  Rational rtts;                            // k_c + 1
  std::vector<Rational> windows_at_start;
  std::vector<Rational> windows_at_congestion;
  Rational aggregate_at_congestion;         // z at the congestion RTT
  Rational packets_sent;                    // arithmetic-series total over the cycle
  bool exact_capacity_hit = false;          // z == W exactly at congestion
  Rational jain;                            // fairness over windows_at_congestion
};

std::vector<CycleRecord> run_sync(const SyncConfig& config);

/// Closed-form step counts for the two-flow gains-retained system:
/// [k1, (W - 2 k1) / 4, then halving each subsequent cycle].
std::vector<Rational> closed_form_ks(const Rational& capacity, const Rational& k1, int cycles);

/// Closed-form packets per cycle, (1 + k_c)(W - k_c). Two-flow, alpha = 1.
Rational cycle_packet_total(const Rational& capacity, const Rational& k_c);

/// Aggregate window at a given step of cycle |k_history.size() + 1|.
/// NewAimd: sum(x)/2^(c-1) + m*alpha*(sum(k) + step).
/// Aimd: the previous congestion aggregate halves at each cycle boundary.
Rational aggregate_window(PolicyKind kind, const std::vector<Rational>& initial_windows,
                          const std::vector<Rational>& k_history, const Rational& step,
                          const Rational& additive_step = 1);

Rational jain_index_exact(const std::vector<Rational>& values);

/// Closed-form predictions lined up against the stepped records.
/// Computed for the two-flow, alpha = 1 form; otherwise left empty.
struct EpochAnalytics {
  std::vector<Rational> closed_form_k;
  std::vector<Rational> closed_form_totals;
  std::vector<Rational> jain_per_cycle;
  std::vector<bool> discrepancy;  // true where stepped run and closed form disagree
};

EpochAnalytics analyze_epochs(const SyncConfig& config, const std::vector<CycleRecord>& records);

struct PolicyComparison {
  PolicyKind kind = PolicyKind::Aimd;
  int cycles_recorded = 0;
  int cycles_to_fairness = -1;    // first cycle with Jain >= 1 - 1e-6, -1 if none
  Rational steady_mean_per_rtt;   // mean aggregate per RTT of the first post-decrease cycle
  Rational total_packets;         // summed over recorded cycles
};

/// Runs both policies on the same (x, W) and summarizes efficiency/fairness.
std::vector<PolicyComparison> compare_policies(const SyncConfig& config);

/// Per-cycle CSV: cycle,k_c,rtts,aggregate_at_congestion,packets,jain_index,closed_form_match
void write_cycles_csv(std::ostream& out, const std::vector<CycleRecord>& records,
                      const EpochAnalytics* analytics);

}  // namespace aimdlab

//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/sync_model.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "aimdlab/errors.hpp"

namespace aimdlab {

namespace {

Rational sum_of(const std::vector<Rational>& values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

std::vector<Rational> window_snapshot(const std::vector<WindowPolicy<Rational>>& flows) {
  std::vector<Rational> out;
  out.reserve(flows.size());
  for (const auto& f : flows) out.push_back(f.cwnd());
  return out;
}

void validate(const SyncConfig& cfg) {
  if (cfg.initial_windows.empty()) throw ConfigError("initial_windows must not be empty");
  for (const auto& x : cfg.initial_windows)
    if (!(x >= 1)) throw ConfigError("initial_windows entries must be >= 1");
  Rational total = sum_of(cfg.initial_windows);
  if (!(cfg.capacity > total))
    throw ConfigError("capacity must exceed the aggregate initial window");
  if (cfg.max_cycles < 1) throw ConfigError("max_cycles must be >= 1");
  if (!(cfg.additive_step > 0)) throw ConfigError("additive_step must be > 0");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Rational jain_index_exact(const std::vector<Rational>& values) {
  if (values.empty()) throw ConfigError("values must not be empty");
  Rational total = 0;
  Rational square_sum = 0;
  for (const auto& v : values) {
    if (v < 0) throw ConfigError("values must be non-negative");
    total += v;
    square_sum += v * v;
  }
  if (square_sum == 0) throw ConfigError("all-zero values");
  return Rational(total * total) / Rational(Rational(values.size()) * square_sum);
}

std::vector<CycleRecord> run_sync(const SyncConfig& cfg) {
  validate(cfg);
  const std::size_t m = cfg.initial_windows.size();

  std::vector<WindowPolicy<Rational>> flows;
  flows.reserve(m);
  for (const auto& x : cfg.initial_windows) {
    PolicyParams<Rational> params;
    params.additive_step = cfg.additive_step;
    params.initial_window = x;
    flows.emplace_back(cfg.kind, params);
  }

  const Rational per_step = cfg.additive_step * Rational(m);
  const long step_bound =
      static_cast<long>(std::ceil(to_double(Rational(cfg.capacity / per_step)))) + 2;

  std::vector<CycleRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.max_cycles));

  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    CycleRecord rec;
    rec.cycle_index = cycle;
    rec.windows_at_start = window_snapshot(flows);

    // The aggregate advances by m * alpha per whole round, so it can be
    // tracked incrementally; the congestion snapshot below re-derives it
    // from the flow states as a consistency check.
    Rational z = sum_of(rec.windows_at_start);
    const Rational z_start = z;
    Rational steps = 0;
    long guard = 0;

    while (true) {
      if (z >= cfg.capacity) {
        rec.steps = steps;
        rec.rtts = steps + 1;
        rec.windows_at_congestion = window_snapshot(flows);
        rec.aggregate_at_congestion = z;
        rec.exact_capacity_hit = (z == cfg.capacity);
        rec.packets_sent = Rational((steps + 1) * (z_start + z)) / 2;
        rec.jain = jain_index_exact(rec.windows_at_congestion);
        if (sum_of(rec.windows_at_congestion) != z)
          throw SimError("internal: incremental aggregate drifted from the flow states");
        break;
      }
      if (++guard > step_bound)
        throw SimError("sync cycle did not reach capacity within the step bound");

      Rational gap = cfg.capacity - z;
      if (cfg.arithmetic == SyncArithmetic::Rational && gap < per_step) {
        Rational fraction = gap / per_step;
        for (auto& f : flows) f.on_round_fraction(fraction);
        steps += fraction;
        z = cfg.capacity;
      } else {
        for (auto& f : flows) f.on_ack(AckMode::PerRound);
        steps += 1;
        z += per_step;
      }
    }

    records.push_back(std::move(rec));
    for (auto& f : flows) f.on_loss_event();
  }

  return records;
}

std::vector<Rational> closed_form_ks(const Rational& capacity, const Rational& k1, int cycles) {
  if (cycles < 1) throw ConfigError("cycles must be >= 1");
  if (k1 < 0) throw ConfigError("k1 must be >= 0");
  if (!(capacity > 2 * k1))
    throw ConfigError("capacity must exceed 2*k1: second-cycle step count degenerates");

  std::vector<Rational> ks;
  ks.reserve(static_cast<std::size_t>(cycles));
  ks.push_back(k1);
  if (cycles >= 2) {
    Rational k = Rational(capacity - 2 * k1) / 4;
    ks.push_back(k);
    for (int c = 3; c <= cycles; ++c) {
      k = k / 2;
      ks.push_back(k);
    }
  }
  return ks;
}

Rational cycle_packet_total(const Rational& capacity, const Rational& k_c) {
  if (k_c < 0 || !(k_c < capacity))
    throw ConfigError("step count must satisfy 0 <= k_c < capacity");
  return Rational((1 + k_c) * (capacity - k_c));
}

Rational aggregate_window(PolicyKind kind, const std::vector<Rational>& initial_windows,
                          const std::vector<Rational>& k_history, const Rational& step,
                          const Rational& additive_step) {
  if (initial_windows.empty()) throw ConfigError("initial_windows must not be empty");
  const Rational m = Rational(initial_windows.size());
  const Rational per_step = m * additive_step;
  Rational x_total = sum_of(initial_windows);

  if (kind == PolicyKind::NewAimd) {
    Rational pow2 = 1;
    for (std::size_t i = 0; i < k_history.size(); ++i) pow2 *= 2;
    Rational k_total = sum_of(k_history);
    return Rational(x_total / pow2) + per_step * (k_total + step);
  }

  // Aimd: the whole aggregate halves at each past congestion event.
  Rational z = x_total;
  for (const auto& k : k_history) z = Rational(z + per_step * k) / 2;
  return z + per_step * step;
}

EpochAnalytics analyze_epochs(const SyncConfig& cfg, const std::vector<CycleRecord>& records) {
  EpochAnalytics a;
  a.jain_per_cycle.reserve(records.size());
  for (const auto& rec : records) a.jain_per_cycle.push_back(rec.jain);

  const bool two_flow_unit_alpha =
      cfg.initial_windows.size() == 2 && cfg.additive_step == 1 && !records.empty();
  if (!two_flow_unit_alpha) return a;

  const Rational k1 = records[0].steps;
  const int cycles = static_cast<int>(records.size());

  if (cfg.kind == PolicyKind::NewAimd) {
    if (!(cfg.capacity > 2 * k1)) return a;
    a.closed_form_k = closed_form_ks(cfg.capacity, k1, cycles);
  } else {
    a.closed_form_k.push_back(k1);
    for (int c = 2; c <= cycles; ++c) a.closed_form_k.push_back(Rational(cfg.capacity) / 4);
  }

  a.closed_form_totals.reserve(a.closed_form_k.size());
  a.discrepancy.reserve(a.closed_form_k.size());
  for (std::size_t c = 0; c < a.closed_form_k.size(); ++c) {
    const Rational& k_expected = a.closed_form_k[c];
    Rational total_expected = cycle_packet_total(cfg.capacity, k_expected);
    a.closed_form_totals.push_back(total_expected);
    bool match = records[c].exact_capacity_hit && records[c].steps == k_expected &&
                 records[c].packets_sent == total_expected;
    a.discrepancy.push_back(!match);
  }
  return a;
}

std::vector<PolicyComparison> compare_policies(const SyncConfig& cfg) {
  const Rational fairness_threshold = Rational(999999) / Rational(1000000);
  std::vector<PolicyComparison> rows;

  for (PolicyKind kind : {PolicyKind::Aimd, PolicyKind::NewAimd}) {
    SyncConfig run_cfg = cfg;
    run_cfg.kind = kind;
    auto records = run_sync(run_cfg);

    PolicyComparison row;
    row.kind = kind;
    row.cycles_recorded = static_cast<int>(records.size());
    row.total_packets = 0;
    for (const auto& rec : records) {
      row.total_packets += rec.packets_sent;
      if (row.cycles_to_fairness < 0 && rec.jain >= fairness_threshold)
        row.cycles_to_fairness = rec.cycle_index;
    }
    const auto& steady = records.size() >= 2 ? records[1] : records[0];
    row.steady_mean_per_rtt = steady.packets_sent / steady.rtts;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cycles_csv(std::ostream& out, const std::vector<CycleRecord>& records,
                      const EpochAnalytics* analytics) {
  out << "cycle,k_c,rtts,aggregate_at_congestion,packets,jain_index,closed_form_match\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    int match = 0;
    if (analytics != nullptr && i < analytics->discrepancy.size() && !analytics->discrepancy[i])
      match = 1;
    out << rec.cycle_index << ',' << format_double(to_double(rec.steps)) << ','
        << format_double(to_double(rec.rtts)) << ','
        << format_double(to_double(rec.aggregate_at_congestion)) << ','
        << format_double(to_double(rec.packets_sent)) << ','
        << format_double(to_double(rec.jain)) << ',' << match << '\n';
  }
}

}  // namespace aimdlab

//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include <random>
#include <sstream>

#include <doctest.h>

#include "aimdlab/sync_model.hpp"

using namespace aimdlab;

namespace {

SyncConfig two_flow(long capacity, long x1, long x2, PolicyKind kind,
                    SyncArithmetic arithmetic, int cycles) {
  SyncConfig cfg;
  cfg.capacity = capacity;
  cfg.initial_windows = {Rational(x1), Rational(x2)};
  cfg.kind = kind;
  cfg.arithmetic = arithmetic;
  cfg.max_cycles = cycles;
  return cfg;
}

// Independent oracle: literal per-RTT sum of the aggregate over one cycle,
// starting from z_start and stepping +2 per RTT until capacity is reached.
Rational brute_force_cycle_total(const Rational& z_start, const Rational& capacity) {
  Rational z = z_start;
  Rational total = 0;
  while (true) {
    total += z;
    if (z >= capacity) return total;
    z += 2;
  }
}

}  // namespace

TEST_CASE("known case: W=24, x=[2,6]") {
  auto records = run_sync(two_flow(24, 2, 6, PolicyKind::NewAimd, SyncArithmetic::Integer, 3));
  REQUIRE(records.size() == 3);
  CHECK(records[0].steps == 8);
  CHECK(records[1].steps == 2);
  CHECK(records[2].steps == 1);
  CHECK(records[0].rtts == 9);
  CHECK(records[0].packets_sent == 144);
  CHECK(records[1].packets_sent == 66);
  CHECK(records[2].packets_sent == 46);
  CHECK(records[0].aggregate_at_congestion == 24);
  CHECK(records[1].windows_at_start == std::vector<Rational>{9, 11});
  CHECK(records[0].windows_at_congestion == std::vector<Rational>{10, 14});
  for (const auto& rec : records) CHECK(rec.exact_capacity_hit);

  auto aimd = run_sync(two_flow(24, 2, 6, PolicyKind::Aimd, SyncArithmetic::Integer, 2));
  REQUIRE(aimd.size() == 2);
  CHECK(aimd[0].steps == 8);
  CHECK(aimd[1].steps == 6);
  CHECK(aimd[1].windows_at_start == std::vector<Rational>{5, 7});
  CHECK(aimd[1].packets_sent == 126);
}

TEST_CASE("single user reaches the threshold in (W - x) steps") {
  SyncConfig cfg;
  cfg.initial_windows = {Rational(7)};
  cfg.max_cycles = 1;
  cfg.capacity = 8;  // one step: 7 + 1 >= 8
  for (PolicyKind kind : {PolicyKind::Aimd, PolicyKind::NewAimd}) {
    cfg.kind = kind;
    auto records = run_sync(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].steps == 1);
  }
  cfg.capacity = 9;  // two steps
  auto records = run_sync(cfg);
  CHECK(records[0].steps == 2);
}

TEST_CASE("three users: aggregate climbs by m per RTT, baselines halve per flow") {
  SyncConfig cfg;
  cfg.capacity = 12;
  cfg.initial_windows = {1, 2, 3};
  cfg.kind = PolicyKind::NewAimd;
  cfg.max_cycles = 2;
  auto records = run_sync(cfg);
  REQUIRE(records.size() == 2);
  CHECK(records[0].steps == 2);  // 6, 9, 12
  CHECK(records[0].windows_at_congestion == std::vector<Rational>{3, 4, 5});
  CHECK(records[1].windows_at_start ==
        std::vector<Rational>{Rational(5) / 2, 3, Rational(7) / 2});
}

TEST_CASE("additive step other than one") {
  SyncConfig cfg;
  cfg.capacity = 24;
  cfg.initial_windows = {2, 6};
  cfg.kind = PolicyKind::NewAimd;
  cfg.additive_step = 2;
  cfg.max_cycles = 1;
  auto records = run_sync(cfg);
  CHECK(records[0].steps == 4);  // 8, 12, 16, 20, 24
  CHECK(records[0].exact_capacity_hit);
  CHECK(records[0].windows_at_congestion == std::vector<Rational>{10, 14});
}

TEST_CASE("run_sync input validation") {
  SyncConfig cfg;
  cfg.capacity = 4;
  cfg.initial_windows = {Rational(2), Rational(6)};
  CHECK_THROWS_AS(run_sync(cfg), ConfigError);  // capacity below aggregate start
  cfg.initial_windows.clear();
  CHECK_THROWS_AS(run_sync(cfg), ConfigError);
}

TEST_CASE("closed-form step counts") {
  auto ks = closed_form_ks(24, 8, 4);
  CHECK(ks == std::vector<Rational>{8, 2, 1, Rational(1) / 2});
  auto wide = closed_form_ks(40, 10, 3);
  CHECK(wide == std::vector<Rational>{10, 5, Rational(5) / 2});
  CHECK_THROWS_AS(closed_form_ks(16, 8, 3), ConfigError);  // W == 2 k1 degenerates
  CHECK_THROWS_AS(closed_form_ks(10, 8, 3), ConfigError);
}

TEST_CASE("cycle packet totals against the brute-force sum") {
  CHECK(cycle_packet_total(24, 8) == 144);
  CHECK(cycle_packet_total(24, 2) == 66);
  CHECK(cycle_packet_total(24, 0) == 24);
  CHECK(cycle_packet_total(17, 0) == 17);
  CHECK_THROWS_AS(cycle_packet_total(24, 24), ConfigError);

  // z_start = W - 2k reproduces (1 + k)(W - k) by literal stepping.
  for (long capacity : {10L, 24L, 37L, 120L}) {
    for (long k = 0; 2 * k < capacity; k += 3) {
      Rational z_start = capacity - 2 * k;
      CHECK(brute_force_cycle_total(z_start, capacity) ==
            cycle_packet_total(capacity, Rational(k)));
    }
  }
}

TEST_CASE("aggregate window forms") {
  std::vector<Rational> x = {2, 6};
  CHECK(aggregate_window(PolicyKind::NewAimd, x, {8}, 0) == 20);
  CHECK(aggregate_window(PolicyKind::Aimd, x, {8}, 0) == 12);
  CHECK(aggregate_window(PolicyKind::NewAimd, x, {}, 0) == 8);
  CHECK(aggregate_window(PolicyKind::Aimd, x, {}, 0) == 8);
  // Mid-cycle steps add m * alpha each.
  CHECK(aggregate_window(PolicyKind::NewAimd, x, {8}, 2) == 24);
  CHECK(aggregate_window(PolicyKind::Aimd, x, {8}, 6) == 24);
}

TEST_CASE("rational mode matches the stepped aggregates mid-cycle") {
  auto records = run_sync(two_flow(24, 2, 6, PolicyKind::NewAimd, SyncArithmetic::Rational, 3));
  std::vector<Rational> k_history;
  for (const auto& rec : records) {
    Rational z_start = 0;
    for (const auto& w : rec.windows_at_start) z_start += w;
    CHECK(aggregate_window(PolicyKind::NewAimd, {2, 6}, k_history, 0) == z_start);
    CHECK(aggregate_window(PolicyKind::NewAimd, {2, 6}, k_history, rec.steps) ==
          rec.aggregate_at_congestion);
    k_history.push_back(rec.steps);
  }
}

TEST_CASE("oracle equivalence: randomized rational-mode identities") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> capacity_dist(8, 10000);
  for (int trial = 0; trial < 400; ++trial) {
    long capacity = capacity_dist(rng);
    std::uniform_int_distribution<long> sum_dist(2, capacity - 2);
    long x_sum = sum_dist(rng);
    if ((capacity - x_sum) % 2 != 0) x_sum = x_sum > 2 ? x_sum - 1 : x_sum + 1;
    long x1 = std::max(1L, x_sum / 3);
    long x2 = x_sum - x1;

    auto records =
        run_sync(two_flow(capacity, x1, x2, PolicyKind::NewAimd, SyncArithmetic::Rational, 5));
    auto expected = closed_form_ks(capacity, records[0].steps, 5);
    for (std::size_t c = 0; c < records.size(); ++c) {
      REQUIRE(records[c].exact_capacity_hit);
      CHECK(records[c].steps == expected[c]);
      CHECK(records[c].packets_sent == cycle_packet_total(capacity, records[c].steps));
    }
    auto analytics = analyze_epochs(
        two_flow(capacity, x1, x2, PolicyKind::NewAimd, SyncArithmetic::Rational, 5), records);
    for (bool flagged : analytics.discrepancy) CHECK_FALSE(flagged);
  }
}

TEST_CASE("integer mode: overshoot stays below m * alpha") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<long> capacity_dist(8, 2000);
  for (int trial = 0; trial < 200; ++trial) {
    long capacity = capacity_dist(rng);
    std::uniform_int_distribution<long> x_dist(1, capacity / 2 - 1);
    long x1 = x_dist(rng);
    long x2 = std::max(1L, x_dist(rng));
    if (x1 + x2 >= capacity) continue;
    for (PolicyKind kind : {PolicyKind::Aimd, PolicyKind::NewAimd}) {
      auto records = run_sync(two_flow(capacity, x1, x2, kind, SyncArithmetic::Integer, 6));
      for (const auto& rec : records) {
        CHECK(rec.aggregate_at_congestion >= capacity);
        CHECK(rec.aggregate_at_congestion - capacity < 2);
      }
    }
  }
}

TEST_CASE("fairness: gap halves exactly each cycle and Jain is non-decreasing") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<long> capacity_dist(10, 10000);
  for (int trial = 0; trial < 100; ++trial) {
    long capacity = capacity_dist(rng);
    std::uniform_int_distribution<long> x_dist(1, capacity / 2 - 2);
    long x1 = x_dist(rng);
    long x2 = x_dist(rng);
    if (x1 == x2) x2 += 1;
    if (x1 + x2 >= capacity) continue;

    auto records =
        run_sync(two_flow(capacity, x1, x2, PolicyKind::NewAimd, SyncArithmetic::Rational, 12));
    Rational gap = Rational(x2 > x1 ? x2 - x1 : x1 - x2);
    Rational last_jain = 0;
    for (const auto& rec : records) {
      Rational observed = rec.windows_at_congestion[1] - rec.windows_at_congestion[0];
      if (observed < 0) observed = -observed;
      CHECK(observed == gap);
      CHECK(rec.jain >= last_jain);
      last_jain = rec.jain;
      gap /= 2;
    }
    CHECK(records.back().jain >= Rational(999999) / 1000000);
  }
}

TEST_CASE("feedback semantics: exactly one decrease between cycles") {
  auto sum = [](const std::vector<Rational>& w) {
    Rational total = 0;
    for (const auto& v : w) total += v;
    return total;
  };

  // NewAimd: one decrease removes exactly half the remaining baseline,
  // sum(x) / 2^c after cycle c.
  auto records = run_sync(two_flow(50, 3, 9, PolicyKind::NewAimd, SyncArithmetic::Integer, 8));
  Rational baseline_total = 12;
  for (std::size_t c = 0; c + 1 < records.size(); ++c) {
    CHECK(records[c].aggregate_at_congestion >= 50);
    Rational drop =
        sum(records[c].windows_at_congestion) - sum(records[c + 1].windows_at_start);
    CHECK(drop == baseline_total / 2);
    baseline_total /= 2;
  }

  // Aimd: one decrease halves the whole congestion aggregate.
  auto classic = run_sync(two_flow(50, 3, 9, PolicyKind::Aimd, SyncArithmetic::Integer, 8));
  for (std::size_t c = 0; c + 1 < classic.size(); ++c) {
    CHECK(sum(classic[c + 1].windows_at_start) ==
          sum(classic[c].windows_at_congestion) / 2);
  }
}

TEST_CASE("policy comparison: steady means, fairness cycle counts") {
  auto rows = compare_policies(two_flow(24, 2, 6, PolicyKind::NewAimd,
                                        SyncArithmetic::Rational, 12));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].kind == PolicyKind::Aimd);
  CHECK(rows[1].kind == PolicyKind::NewAimd);
  CHECK(rows[1].steady_mean_per_rtt == 22);
  CHECK(rows[0].steady_mean_per_rtt == 18);
  CHECK(rows[1].cycles_to_fairness > 0);
  CHECK(rows[1].cycles_to_fairness <= 12);

  auto symmetric =
      compare_policies(two_flow(30, 4, 4, PolicyKind::NewAimd, SyncArithmetic::Rational, 4));
  CHECK(symmetric[0].cycles_to_fairness == 1);
  CHECK(symmetric[1].cycles_to_fairness == 1);
}

TEST_CASE("efficiency dominance across a grid") {
  int configs = 0;
  for (long capacity = 12; capacity <= 120; capacity += 4) {
    for (long x1 = 1; x1 <= 5; x1 += 2) {
      long x2 = x1 + 4;
      if (x1 + x2 >= capacity) continue;
      auto rows = compare_policies(
          two_flow(capacity, x1, x2, PolicyKind::NewAimd, SyncArithmetic::Rational, 6));
      CHECK(rows[1].steady_mean_per_rtt > rows[0].steady_mean_per_rtt);
      ++configs;
    }
  }
  CHECK(configs >= 80);
}

TEST_CASE("cycle CSV layout") {
  auto cfg = two_flow(24, 2, 6, PolicyKind::NewAimd, SyncArithmetic::Integer, 2);
  auto records = run_sync(cfg);
  auto analytics = analyze_epochs(cfg, records);
  std::ostringstream out;
  write_cycles_csv(out, records, &analytics);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "cycle,k_c,rtts,aggregate_at_congestion,packets,jain_index,closed_form_match");
  std::getline(lines, line);
  CHECK(line.rfind("1,8,9,24,144,", 0) == 0);
  CHECK(line.back() == '1');
}

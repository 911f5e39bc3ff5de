//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "aimdlab/errors.hpp"

namespace aimdlab {

enum class PolicyKind {
  Aimd,     // classic: +alpha per round, halve the whole window on loss
  NewAimd,  // halve only the epoch baseline on loss, keep additive gains
};

inline const char* to_string(PolicyKind kind) {
  return kind == PolicyKind::Aimd ? "aimd" : "new-aimd";
}

inline PolicyKind parse_policy_kind(const std::string& text) {
  if (text == "aimd") return PolicyKind::Aimd;
  if (text == "new-aimd" || text == "newaimd" || text == "new_aimd") return PolicyKind::NewAimd;
  throw ConfigError("unknown policy: " + text);
}

enum class AckMode {
  PerRound,  // cwnd += alpha, once per RTT
  PerAck,    // cwnd += alpha / cwnd, so a full window of ACKs sums to +alpha
};

template <typename Scalar>
struct PolicyParams {
  Scalar additive_step = Scalar(1);                 // alpha, segments per RTT
  Scalar decrease_factor = Scalar(1) / Scalar(2);   // multiplicative decrease fraction
  Scalar initial_window = Scalar(1);                // segments
  Scalar min_window = Scalar(1);                    // floor, avoids transport deadlock
  std::int64_t mss_bytes = 1000;
};

template <typename Scalar>
void validate(const PolicyParams<Scalar>& p) {
  if (!(p.additive_step > Scalar(0))) throw ConfigError("additive_step must be > 0");
  if (!(p.decrease_factor > Scalar(0)) || !(p.decrease_factor < Scalar(1)))
    throw ConfigError("decrease_factor must be in (0, 1)");
  if (!(p.min_window >= Scalar(1))) throw ConfigError("min_window must be >= 1");
  if (!(p.initial_window >= p.min_window)) throw ConfigError("initial_window < min_window");
  if (p.mss_bytes <= 0) throw ConfigError("mss_bytes must be > 0");
}

/// Pure congestion-window state machine, shared by the synchronous
/// binary-feedback model (Scalar = Rational, exact) and the packet-level
/// transport (Scalar = double).
///
/// The window decomposes as cwnd = baseline + gains. For NewAimd a loss
/// event halves only the baseline; additive gains accrued since flow start
/// are retained, so the decrease is baseline/2 <= cwnd/2. For Aimd the
/// whole window halves and the decomposition fields stay at zero.
template <typename Scalar>
class WindowPolicy {
 public:
  WindowPolicy(PolicyKind kind, PolicyParams<Scalar> params)
      : kind_(kind), params_(std::move(params)) {
    validate(params_);
    cwnd_ = params_.initial_window;
    baseline_ = kind_ == PolicyKind::NewAimd ? params_.initial_window : Scalar(0);
    gains_ = Scalar(0);
  }

  void on_ack(AckMode mode) {
    Scalar inc = params_.additive_step;
    if (mode == AckMode::PerAck) inc = Scalar(params_.additive_step / cwnd_);
    cwnd_ += inc;
    if (kind_ == PolicyKind::NewAimd) gains_ += inc;
  }

  /// Fractional additive round: adds fraction * alpha. The exact-arithmetic
  /// model uses this to land on the capacity threshold with equality.
  void on_round_fraction(const Scalar& fraction) {
    Scalar inc = Scalar(params_.additive_step * fraction);
    cwnd_ += inc;
    if (kind_ == PolicyKind::NewAimd) gains_ += inc;
  }

  void on_loss_event() {
    if (kind_ == PolicyKind::Aimd) {
      Scalar halved = Scalar(cwnd_ * params_.decrease_factor);
      cwnd_ = std::max(params_.min_window, halved);
    } else {
      Scalar cut = Scalar(baseline_ * (Scalar(1) - params_.decrease_factor));
      Scalar reduced = Scalar(cwnd_ - cut);
      cwnd_ = std::max(params_.min_window, reduced);
      baseline_ = Scalar(baseline_ * params_.decrease_factor);
      // Re-establish cwnd = baseline + gains (changes gains only when the
      // min_window clamp engaged).
      gains_ = Scalar(cwnd_ - baseline_);
    }
    ++epoch_index_;
    ++loss_events_;
  }

  PolicyKind kind() const { return kind_; }
  const PolicyParams<Scalar>& params() const { return params_; }
  const Scalar& cwnd() const { return cwnd_; }
  const Scalar& baseline() const { return baseline_; }
  const Scalar& gains() const { return gains_; }
  std::uint64_t epoch_index() const { return epoch_index_; }
  std::uint64_t loss_events() const { return loss_events_; }

 private:
  PolicyKind kind_;
  PolicyParams<Scalar> params_;
  Scalar cwnd_{};
  Scalar baseline_{};
  Scalar gains_{};
  std::uint64_t epoch_index_ = 1;
  std::uint64_t loss_events_ = 0;
};

}  // namespace aimdlab

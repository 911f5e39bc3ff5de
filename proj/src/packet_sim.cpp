//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "aimdlab/errors.hpp"
#include "aimdlab/policy.hpp"

namespace aimdlab {

SimTime seconds_to_simtime(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * static_cast<double>(kPicosecondsPerSecond)));
}

double serialize_delay(std::int64_t size_bytes, double bandwidth_bits_per_s) {
  if (!(bandwidth_bits_per_s > 0)) throw ConfigError("bandwidth must be > 0");
  if (size_bytes < 0) throw ConfigError("size must be >= 0");
  return static_cast<double>(size_bytes) * 8.0 / bandwidth_bits_per_s;
}

SimTime serialize_delay_ps(std::int64_t size_bytes, double bandwidth_bits_per_s) {
  return seconds_to_simtime(serialize_delay(size_bytes, bandwidth_bits_per_s));
}

DropTailQueue::DropTailQueue(int capacity_packets) : capacity_(capacity_packets) {
  if (capacity_ < 1) throw ConfigError("queue_capacity must be >= 1");
}

EnqueueResult DropTailQueue::enqueue(Packet p, SimTime now) {
  ++enqueued_;  // arrivals, so that enqueued == dequeued + dropped + occupancy
  if (occupancy_packets() >= capacity_) {
    ++dropped_;
    return EnqueueResult::Dropped;
  }
  if (now < p.ts_sent || (p.ts_dequeued >= 0 && now < p.ts_dequeued))
    throw SimError("packet enqueued before an earlier timestamp");
  p.ts_enqueued = now;
  occupancy_bytes_ += p.size_bytes;
  fifo_.push_back(std::move(p));
  return EnqueueResult::Accepted;
}

Packet DropTailQueue::dequeue(SimTime now) {
  if (fifo_.empty()) throw SimError("dequeue from an empty queue");
  Packet p = std::move(fifo_.front());
  fifo_.pop_front();
  if (now < p.ts_enqueued) throw SimError("packet dequeued before it was enqueued");
  p.ts_dequeued = now;
  occupancy_bytes_ -= p.size_bytes;
  ++dequeued_;
  return p;
}

void RttEstimator::add_sample(SimTime rtt) {
  if (rtt < 0) throw SimError("negative RTT sample");
  if (srtt_ < 0) {
    srtt_ = rtt;
    rttvar_ = rtt / 2;
  } else {
    rttvar_ = (3 * rttvar_ + std::llabs(srtt_ - rtt)) / 4;
    srtt_ = (7 * srtt_ + rtt) / 8;
  }
  current_rto_ = std::clamp(srtt_ + 4 * rttvar_, kMinRto, kMaxRto);
}

void RttEstimator::backoff() { current_rto_ = std::min(current_rto_ * 2, kMaxRto); }

DumbbellTopology build_dumbbell(const ScenarioConfig& cfg) {
  if (cfg.n_flows < 1) throw ConfigError("n_flows must be >= 1");
  DumbbellTopology t;
  t.n_flows = cfg.n_flows;
  t.node_count = 2 * cfg.n_flows + 2;
  t.duplex_link_count = 2 * cfg.n_flows + 1;
  t.links.resize(4 * cfg.n_flows + 2);

  auto set_link = [&](int id, int src, int dst, bool forward, bool bottleneck) {
    t.links[id] = DirectedLink{id, src, dst, forward, bottleneck};
  };
  for (int f = 0; f < cfg.n_flows; ++f) {
    set_link(t.uplink(f), t.sender_node(f), t.router_in(), true, false);
    set_link(t.downlink(f), t.router_out(), t.receiver_node(f), true, false);
    set_link(t.uplink_rev(f), t.receiver_node(f), t.router_out(), false, false);
    set_link(t.downlink_rev(f), t.router_in(), t.sender_node(f), false, false);
  }
  set_link(t.bottleneck_fwd(), t.router_in(), t.router_out(), true, true);
  set_link(t.bottleneck_rev(), t.router_out(), t.router_in(), false, false);
  return t;
}

namespace {

struct Event {
  SimTime time = 0;
  std::uint64_t order = 0;
  EventKind kind = EventKind::AppSend;
  int target = -1;        // link id or flow id, depending on kind
  std::uint64_t aux = 0;  // timer generation
  Packet pkt;
  bool has_pkt = false;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.order > b.order;
  }
};

struct LinkRuntime {
  DirectedLink meta;
  DropTailQueue queue;
  bool busy = false;
  Packet in_flight;
};

struct SenderState {
  explicit SenderState(WindowPolicy<double> p) : policy(std::move(p)) {}

  WindowPolicy<double> policy;
  std::uint64_t segments_total = 0;  // max() means long-lived
  std::int64_t bytes_total = 0;
  std::uint64_t highest_sent = 0;
  std::uint64_t cum_acked = 0;
  int dupacks = 0;
  bool in_recovery = false;
  std::uint64_t recovery_high = 0;
  std::set<std::uint64_t> sacked;             // seqs above cum reported held by receiver
  std::set<std::uint64_t> rexmitted_episode;  // retransmitted during this episode
  RttEstimator rtt;
  bool rtt_pending = false;
  std::uint64_t rtt_seq = 0;
  SimTime rtt_sent_at = -1;
  bool timer_armed = false;
  std::uint64_t timer_gen = 0;
  // counters
  std::uint64_t data_sent_new = 0;
  std::uint64_t data_retransmits = 0;
  std::uint64_t recovery_episodes = 0;
  std::uint64_t rto_events = 0;

  std::uint64_t outstanding() const { return highest_sent - cum_acked; }
  std::uint64_t floor_cwnd() const {
    return static_cast<std::uint64_t>(std::max(1.0, std::floor(policy.cwnd())));
  }
};

struct ReceiverState {
  std::uint64_t cum = 0;
  std::set<std::uint64_t> out_of_order;
  std::uint64_t delivered_segments = 0;
  std::int64_t delivered_bytes = 0;
  std::uint64_t duplicates = 0;
  std::vector<bool> delivered_once;  // transfer mode exactly-once check
  SimTime finish_time = -1;
};

class DumbbellSim {
 public:
  explicit DumbbellSim(const ScenarioConfig& cfg) : cfg_(cfg), topo_(build_dumbbell(cfg)) {
    validate_scenario(cfg_);
    transfer_mode_ = cfg_.transfer_size >= 0;
    propagation_ps_ = seconds_to_simtime(propagation_delay_s(cfg_));
    duration_ps_ = seconds_to_simtime(cfg_.sim_duration);
    max_sim_ps_ = seconds_to_simtime(cfg_.max_sim_time);
    double interval_s = cfg_.sample_interval > 0 ? cfg_.sample_interval : base_rtt_s(cfg_);
    sample_interval_ps_ = std::max<SimTime>(1, seconds_to_simtime(interval_s));
    delays_.bucket_width_s = base_rtt_s(cfg_);

    links_.reserve(topo_.links.size());
    for (const auto& meta : topo_.links)
      links_.push_back(LinkRuntime{meta, DropTailQueue(cfg_.queue_capacity), false, Packet{}});

    PolicyParams<double> params;
    params.additive_step = cfg_.additive_step;
    params.initial_window = cfg_.initial_window;
    params.mss_bytes = cfg_.mss;
    validate(params);

    for (int f = 0; f < cfg_.n_flows; ++f) {
      SenderState s{WindowPolicy<double>(cfg_.policy, params)};
      if (transfer_mode_) {
        s.bytes_total = per_flow_bytes(f);
        s.segments_total =
            static_cast<std::uint64_t>((s.bytes_total + cfg_.mss - 1) / cfg_.mss);
      } else {
        s.bytes_total = 0;
        s.segments_total = std::numeric_limits<std::uint64_t>::max();
      }
      senders_.push_back(std::move(s));
      ReceiverState r;
      if (transfer_mode_)
        r.delivered_once.assign(senders_.back().segments_total + 1, false);
      receivers_.push_back(std::move(r));
    }
  }

  ScenarioResult run();

 private:
  std::int64_t per_flow_bytes(int flow) const {
    if (cfg_.per_flow_transfer) return cfg_.transfer_size;
    std::int64_t base = cfg_.transfer_size / cfg_.n_flows;
    std::int64_t rem = cfg_.transfer_size % cfg_.n_flows;
    return base + (flow < rem ? 1 : 0);
  }

  std::int64_t segment_bytes(const SenderState& s, std::uint64_t seq) const {
    if (!transfer_mode_) return cfg_.mss;
    if (seq < s.segments_total) return cfg_.mss;
    std::int64_t last = s.bytes_total - static_cast<std::int64_t>(s.segments_total - 1) * cfg_.mss;
    return last;
  }

  void schedule(SimTime at, EventKind kind, int target, std::uint64_t aux = 0) {
    if (at < now_) throw SimError("event scheduled in the past");
    Event ev;
    ev.time = at;
    ev.order = next_order_++;
    ev.kind = kind;
    ev.target = target;
    ev.aux = aux;
    heap_.push(std::move(ev));
  }

  void schedule_arrival(SimTime at, int node, Packet pkt) {
    Event ev;
    ev.time = at;
    ev.order = next_order_++;
    ev.kind = EventKind::LinkArrival;
    ev.target = node;
    ev.pkt = std::move(pkt);
    ev.has_pkt = true;
    heap_.push(std::move(ev));
  }

  int route_next(int node, const Packet& p) const {
    if (p.kind == PacketKind::Data) {
      if (node == topo_.sender_node(p.flow)) return topo_.uplink(p.flow);
      if (node == topo_.router_in()) return topo_.bottleneck_fwd();
      if (node == topo_.router_out()) return topo_.downlink(p.flow);
    } else {
      if (node == topo_.receiver_node(p.flow)) return topo_.uplink_rev(p.flow);
      if (node == topo_.router_out()) return topo_.bottleneck_rev();
      if (node == topo_.router_in()) return topo_.downlink_rev(p.flow);
    }
    throw SimError("no route for packet at node " + std::to_string(node));
  }

  void accept_into_link(int link_id, Packet p) {
    auto& link = links_[static_cast<std::size_t>(link_id)];
    if (link.queue.enqueue(std::move(p), now_) == EnqueueResult::Accepted && !link.busy)
      start_transmission(link);
  }

  void start_transmission(LinkRuntime& link) {
    Packet p = link.queue.dequeue(now_);
    const SimTime ser = serialize_delay_ps(p.size_bytes, cfg_.link_bandwidth);
    if (link.meta.bottleneck_forward) {
      delays_.add_queue_sample(to_seconds(now_), to_seconds(now_ - p.ts_enqueued));
      add_util_bits(now_, now_ + ser, static_cast<double>(p.size_bytes) * 8.0);
      forward_bytes_ += static_cast<std::uint64_t>(p.size_bytes);
    }
    link.busy = true;
    link.in_flight = std::move(p);
    schedule(now_ + ser, EventKind::TransmitComplete, link.meta.id);
  }

  void on_transmit_complete(int link_id) {
    auto& link = links_[static_cast<std::size_t>(link_id)];
    if (!link.busy) throw SimError("transmit completion on an idle link");
    Packet p = std::move(link.in_flight);
    link.busy = false;
    schedule_arrival(now_ + propagation_ps_, link.meta.dst_node, std::move(p));
    if (!link.queue.empty()) start_transmission(link);
  }

  void add_util_bits(SimTime t0, SimTime t1, double bits) {
    if (t1 <= t0) return;
    const double span = static_cast<double>(t1 - t0);
    SimTime cursor = t0;
    while (cursor < t1) {
      const auto bin = static_cast<std::size_t>(cursor / kPicosecondsPerSecond);
      const SimTime bin_end = static_cast<SimTime>(bin + 1) * kPicosecondsPerSecond;
      const SimTime seg_end = std::min(t1, bin_end);
      if (util_bits_.size() <= bin) util_bits_.resize(bin + 1, 0.0);
      util_bits_[bin] += bits * static_cast<double>(seg_end - cursor) / span;
      cursor = seg_end;
    }
  }

  // ---- transport: sender side ----

  void emit_segment(int flow, std::uint64_t seq, bool retransmit) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    Packet p;
    p.flow = flow;
    p.seq = seq;
    p.size_bytes = segment_bytes(s, seq);
    p.kind = PacketKind::Data;
    p.retransmit = retransmit;
    p.ts_sent = now_;
    if (retransmit) {
      ++s.data_retransmits;
      s.rexmitted_episode.insert(seq);
      if (s.rtt_pending && seq <= s.rtt_seq) s.rtt_pending = false;  // Karn
    } else {
      ++s.data_sent_new;
      if (!s.rtt_pending) {
        s.rtt_pending = true;
        s.rtt_seq = seq;
        s.rtt_sent_at = now_;
      }
    }
    if (!s.timer_armed) restart_timer(flow);
    accept_into_link(topo_.uplink(flow), std::move(p));
  }

  void send_available(int flow) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    while (s.highest_sent < s.segments_total && s.outstanding() < s.floor_cwnd()) {
      const std::uint64_t seq = ++s.highest_sent;
      emit_segment(flow, seq, false);
      if (s.outstanding() > s.floor_cwnd()) throw SimError("congestion window overrun");
    }
  }

  void restart_timer(int flow) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    ++s.timer_gen;
    s.timer_armed = true;
    schedule(now_ + s.rtt.rto(), EventKind::TimerExpiry, flow, s.timer_gen);
  }

  void stop_timer(int flow) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    ++s.timer_gen;
    s.timer_armed = false;
  }

  bool has_sack_gap(const SenderState& s) const { return !s.sacked.empty(); }

  // Lowest hole not yet retransmitted this episode. Only segments with
  // SACKed data above them count as lost; anything beyond the highest SACK
  // may simply still be in flight.
  std::uint64_t next_hole(const SenderState& s) const {
    if (s.sacked.empty()) return 0;
    const std::uint64_t bound = std::min(s.recovery_high, *s.sacked.rbegin());
    for (std::uint64_t seq = s.cum_acked + 1; seq <= bound; ++seq) {
      if (s.sacked.count(seq) != 0) continue;
      if (s.rexmitted_episode.count(seq) != 0) continue;
      return seq;
    }
    return 0;
  }

  void enter_recovery(int flow) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    if (s.outstanding() == 0) throw SimError("recovery entered with nothing outstanding");
    s.in_recovery = true;
    s.recovery_high = s.highest_sent;
    s.rexmitted_episode.clear();
    ++s.recovery_episodes;
    s.policy.on_loss_event();
    emit_segment(flow, s.cum_acked + 1, true);
    restart_timer(flow);
  }

  void exit_recovery(SenderState& s) {
    s.in_recovery = false;
    s.rexmitted_episode.clear();
    s.dupacks = 0;
  }

  void merge_sack(SenderState& s, const Packet& ack) {
    for (int i = 0; i < ack.sack_count; ++i) {
      const auto& range = ack.sack[static_cast<std::size_t>(i)];
      if (range.last > s.highest_sent)
        throw SimError("protocol error: SACK range beyond highest sent segment");
      for (std::uint64_t seq = range.first; seq <= range.last; ++seq)
        if (seq > s.cum_acked) s.sacked.insert(seq);
    }
  }

  void on_ack_at_sender(const Packet& ack) {
    auto& s = senders_[static_cast<std::size_t>(ack.flow)];
    if (ack.cum_ack > s.highest_sent)
      throw SimError("protocol error: ACK for an unsent segment");
    merge_sack(s, ack);

    if (ack.cum_ack > s.cum_acked) {
      const std::uint64_t newly = ack.cum_ack - s.cum_acked;
      s.cum_acked = ack.cum_ack;
      s.sacked.erase(s.sacked.begin(), s.sacked.upper_bound(s.cum_acked));
      s.rexmitted_episode.erase(s.rexmitted_episode.begin(),
                                s.rexmitted_episode.upper_bound(s.cum_acked));
      s.dupacks = 0;
      if (s.rtt_pending && s.cum_acked >= s.rtt_seq) {
        s.rtt.add_sample(now_ - s.rtt_sent_at);
        s.rtt_pending = false;
      }
      // No additive growth while a recovery episode is open; one congestion
      // signal per round means the decrease stands until the episode ends.
      if (!s.in_recovery)
        for (std::uint64_t i = 0; i < newly; ++i) s.policy.on_ack(AckMode::PerAck);
      if (s.in_recovery && s.cum_acked >= s.recovery_high) {
        exit_recovery(s);
      } else if (s.in_recovery) {
        // Partial ACK: the next hole is lost too, recover it now.
        if (const std::uint64_t hole = next_hole(s); hole != 0)
          emit_segment(ack.flow, hole, true);
      }
      if (!s.in_recovery && has_sack_gap(s)) enter_recovery(ack.flow);
      if (s.outstanding() > 0)
        restart_timer(ack.flow);
      else
        stop_timer(ack.flow);
    } else {
      ++s.dupacks;
      // The path never reorders and every ACK carries SACK state, so a
      // duplicate without a reported gap can only be the echo of a spurious
      // retransmission; only gap evidence enters recovery. A lost
      // retransmission is recovered by the timer.
      if (s.outstanding() == 0 || !has_sack_gap(s)) {
        // Nothing recoverable.
      } else if (!s.in_recovery) {
        enter_recovery(ack.flow);
      } else if (const std::uint64_t hole = next_hole(s); hole != 0) {
        emit_segment(ack.flow, hole, true);
      }
    }
    send_available(ack.flow);
  }

  void on_timer_expiry(int flow, std::uint64_t generation) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    if (!s.timer_armed || generation != s.timer_gen) return;  // stale timer
    s.timer_armed = false;
    if (s.outstanding() == 0) return;
    ++s.rto_events;
    ++s.recovery_episodes;  // a timeout starts a fresh recovery episode
    s.policy.on_loss_event();
    s.in_recovery = true;
    s.recovery_high = s.highest_sent;
    s.rexmitted_episode.clear();
    s.dupacks = 0;
    s.rtt_pending = false;
    s.rtt.backoff();
    emit_segment(flow, s.cum_acked + 1, true);
    restart_timer(flow);
    send_available(flow);
  }

  // ---- transport: receiver side ----

  void deliver_to_app(int flow, std::uint64_t seq) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    auto& r = receivers_[static_cast<std::size_t>(flow)];
    if (!r.delivered_once.empty()) {
      if (r.delivered_once[seq]) throw SimError("duplicate in-order delivery to the application");
      r.delivered_once[seq] = true;
    }
    ++r.delivered_segments;
    r.delivered_bytes += segment_bytes(s, seq);
  }

  void on_data_at_receiver(Packet p) {
    p.ts_delivered = now_;
    if (p.ts_delivered < p.ts_sent) throw SimError("delivery before send");
    delays_.add_e2e_sample(to_seconds(p.ts_delivered - p.ts_sent));

    const int flow = p.flow;
    auto& r = receivers_[static_cast<std::size_t>(flow)];
    auto& s = senders_[static_cast<std::size_t>(flow)];

    if (p.seq == r.cum + 1) {
      r.cum = p.seq;
      deliver_to_app(flow, p.seq);
      while (!r.out_of_order.empty() && *r.out_of_order.begin() == r.cum + 1) {
        r.out_of_order.erase(r.out_of_order.begin());
        ++r.cum;
        deliver_to_app(flow, r.cum);
      }
    } else if (p.seq > r.cum + 1) {
      if (!r.out_of_order.insert(p.seq).second) ++r.duplicates;
    } else {
      ++r.duplicates;
    }

    if (transfer_mode_ && r.finish_time < 0 && r.cum == s.segments_total) {
      r.finish_time = now_;
      ++finished_flows_;
    }

    Packet ack;
    ack.flow = flow;
    ack.kind = PacketKind::Ack;
    ack.size_bytes = cfg_.ack_bytes;
    ack.ts_sent = now_;
    ack.cum_ack = r.cum;
    int count = 0;
    for (auto it = r.out_of_order.begin(); it != r.out_of_order.end() && count < 3;) {
      std::uint64_t first = *it;
      std::uint64_t last = first;
      auto jt = std::next(it);
      while (jt != r.out_of_order.end() && *jt == last + 1) {
        last = *jt;
        ++jt;
      }
      ack.sack[static_cast<std::size_t>(count++)] = SackRange{first, last};
      it = jt;
    }
    ack.sack_count = count;
    accept_into_link(topo_.uplink_rev(flow), std::move(ack));
  }

  // ---- sampling and checks ----

  void verify_queues() const {
    for (const auto& link : links_) {
      if (!link.queue.conserved()) throw SimError("queue conservation violated");
      if (link.queue.occupancy_packets() > cfg_.queue_capacity)
        throw SimError("queue occupancy exceeded capacity");
    }
  }

  void on_sample() {
    verify_queues();
    const auto& q = links_[static_cast<std::size_t>(topo_.bottleneck_fwd())].queue;
    queue_series_.push_back(
        QueueSample{to_seconds(now_), q.occupancy_packets(), q.occupancy_bytes()});
    const SimTime next = now_ + sample_interval_ps_;
    const SimTime horizon = transfer_mode_ ? max_sim_ps_ : duration_ps_;
    if (next <= horizon) schedule(next, EventKind::Sample, 0);
  }

  void on_app_send(int flow) {
    auto& s = senders_[static_cast<std::size_t>(flow)];
    auto& r = receivers_[static_cast<std::size_t>(flow)];
    if (transfer_mode_ && s.segments_total == 0) {
      if (r.finish_time < 0) {
        r.finish_time = now_;
        ++finished_flows_;
      }
      return;
    }
    send_available(flow);
  }

  void trace_row(const Event& ev) {
    if (!trace_) return;
    const char* kind = "";
    int node = -1;
    int flow = -1;
    std::uint64_t seq = 0;
    switch (ev.kind) {
      case EventKind::LinkArrival:
        kind = "link_arrival";
        node = ev.target;
        flow = ev.pkt.flow;
        seq = ev.pkt.seq;
        break;
      case EventKind::TransmitComplete:
        kind = "transmit_complete";
        node = links_[static_cast<std::size_t>(ev.target)].meta.src_node;
        flow = links_[static_cast<std::size_t>(ev.target)].in_flight.flow;
        seq = links_[static_cast<std::size_t>(ev.target)].in_flight.seq;
        break;
      case EventKind::TimerExpiry:
        kind = "timer_expiry";
        node = topo_.sender_node(ev.target);
        flow = ev.target;
        break;
      case EventKind::AppSend:
        kind = "app_send";
        node = topo_.sender_node(ev.target);
        flow = ev.target;
        break;
      case EventKind::Sample:
        kind = "sample";
        node = topo_.router_in();
        break;
    }
    const auto& q = links_[static_cast<std::size_t>(topo_.bottleneck_fwd())].queue;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.9f,%d,%s,%d,%llu,%d\n", to_seconds(ev.time), node, kind,
                  flow, static_cast<unsigned long long>(seq), q.occupancy_packets());
    *trace_ << buf;
  }

  ScenarioResult finalize();

  ScenarioConfig cfg_;
  DumbbellTopology topo_;
  std::vector<LinkRuntime> links_;
  std::vector<SenderState> senders_;
  std::vector<ReceiverState> receivers_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
  std::uint64_t next_order_ = 0;
  SimTime now_ = 0;
  bool transfer_mode_ = false;
  int finished_flows_ = 0;
  SimTime propagation_ps_ = 0;
  SimTime duration_ps_ = 0;
  SimTime max_sim_ps_ = 0;
  SimTime sample_interval_ps_ = 0;
  std::uint64_t events_processed_ = 0;
  std::vector<double> util_bits_;
  std::vector<QueueSample> queue_series_;
  DelayStats delays_;
  std::uint64_t forward_bytes_ = 0;
  std::ofstream trace_file_;
  std::ostream* trace_ = nullptr;
};

ScenarioResult DumbbellSim::run() {
  if (!cfg_.trace_path.empty()) {
    trace_file_.open(cfg_.trace_path);
    if (!trace_file_) throw ConfigError("cannot write trace file: " + cfg_.trace_path);
    trace_ = &trace_file_;
    *trace_ << "time_s,node,event_kind,flow,seq,queue_occupancy\n";
  }

  for (int f = 0; f < cfg_.n_flows; ++f) schedule(0, EventKind::AppSend, f);
  schedule(0, EventKind::Sample, 0);

  while (!heap_.empty()) {
    Event ev = heap_.top();
    heap_.pop();
    if (!transfer_mode_ && ev.time > duration_ps_) break;
    if (transfer_mode_ && ev.time > max_sim_ps_)
      throw SimError("transfer did not complete within max_sim_time");
    now_ = ev.time;
    ++events_processed_;
    trace_row(ev);
    switch (ev.kind) {
      case EventKind::LinkArrival: {
        Packet& p = ev.pkt;
        if (p.kind == PacketKind::Data && ev.target == topo_.receiver_node(p.flow))
          on_data_at_receiver(std::move(p));
        else if (p.kind == PacketKind::Ack && ev.target == topo_.sender_node(p.flow))
          on_ack_at_sender(p);
        else
          accept_into_link(route_next(ev.target, p), std::move(p));
        break;
      }
      case EventKind::TransmitComplete:
        on_transmit_complete(ev.target);
        break;
      case EventKind::TimerExpiry:
        on_timer_expiry(ev.target, ev.aux);
        break;
      case EventKind::AppSend:
        on_app_send(ev.target);
        break;
      case EventKind::Sample:
        on_sample();
        break;
    }
    if (transfer_mode_ && finished_flows_ == cfg_.n_flows) break;
  }

  if (transfer_mode_ && finished_flows_ != cfg_.n_flows)
    throw SimError("event loop stalled before all transfers completed");
  verify_queues();
  return finalize();
}

ScenarioResult DumbbellSim::finalize() {
  ScenarioResult out;
  SummaryReport& report = out.report;

  double completion = 0;
  for (int f = 0; f < cfg_.n_flows; ++f) {
    const auto& r = receivers_[static_cast<std::size_t>(f)];
    if (transfer_mode_)
      completion = std::max(completion, to_seconds(r.finish_time));
  }
  report.completion_s = transfer_mode_ ? completion : cfg_.sim_duration;

  std::vector<double> rates;
  for (int f = 0; f < cfg_.n_flows; ++f) {
    const auto& r = receivers_[static_cast<std::size_t>(f)];
    TransferSummary t;
    t.file_bytes = static_cast<double>(r.delivered_bytes);
    t.duration_s = transfer_mode_ ? to_seconds(std::max<SimTime>(r.finish_time, 0))
                                  : cfg_.sim_duration;
    t.throughput_Bps = t.duration_s > 0 ? t.file_bytes / t.duration_s : 0.0;
    report.per_flow.push_back(t);
    rates.push_back(t.throughput_Bps);
  }

  bool any_positive = false;
  for (double v : rates) any_positive = any_positive || v > 0;
  report.jain = any_positive ? jain_index(rates) : 1.0;

  const auto horizon_bins = static_cast<std::size_t>(
      transfer_mode_ ? std::ceil(report.completion_s) : std::floor(cfg_.sim_duration));
  util_bits_.resize(horizon_bins, 0.0);
  for (double bits : util_bits_)
    if (bits > cfg_.link_bandwidth + 1e-6) report.utilization_overflow = true;
  report.utilization = per_second_utilization(util_bits_, cfg_.link_bandwidth);
  if (!report.utilization.empty() && report.utilization.back().interval_start_s >= 5.0)
    report.avg_utilization_after_warmup = warmup_average(report.utilization, 5.0);
  else
    report.avg_utilization_after_warmup = std::numeric_limits<double>::quiet_NaN();

  report.queue_series = std::move(queue_series_);
  report.delays = std::move(delays_);
  report.bottleneck_forward_bytes = forward_bytes_;
  report.bottleneck_drops =
      links_[static_cast<std::size_t>(topo_.bottleneck_fwd())].queue.dropped();
  for (const auto& link : links_) report.total_drops += link.queue.dropped();

  for (int f = 0; f < cfg_.n_flows; ++f) {
    const auto& s = senders_[static_cast<std::size_t>(f)];
    const auto& r = receivers_[static_cast<std::size_t>(f)];
    FlowCounters c;
    c.segments_total = transfer_mode_ ? s.segments_total : 0;
    c.bytes_total = s.bytes_total;
    c.data_sent_new = s.data_sent_new;
    c.data_retransmits = s.data_retransmits;
    c.recovery_episodes = s.recovery_episodes;
    c.rto_events = s.rto_events;
    c.loss_events = s.policy.loss_events();
    c.delivered_segments = r.delivered_segments;
    c.duplicate_data = r.duplicates;
    c.final_cwnd = s.policy.cwnd();
    c.final_rto = s.rtt.rto();
    c.finish_time = r.finish_time;
    out.flows.push_back(c);
  }
  for (const auto& link : links_) {
    QueueCounters q;
    q.link_id = link.meta.id;
    q.enqueued = link.queue.enqueued();
    q.dequeued = link.queue.dequeued();
    q.dropped = link.queue.dropped();
    q.occupancy = link.queue.occupancy_packets();
    q.conserved = link.queue.conserved();
    out.queues.push_back(q);
  }
  out.events_processed = events_processed_;
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  DumbbellSim sim(cfg);
  return sim.run();
}

}  // namespace aimdlab

#include "edcafair/mac/channel.hpp"

#include <algorithm>
#include <limits>

#include "edcafair/errors.hpp"

namespace edcafair::mac {

namespace {

constexpr std::size_t kMaxBurstScan = 64;

}  // namespace

WirelessChannel::WirelessChannel(sim::Simulator& sim, PhyProfile phy, int retry_limit, Trace* trace)
    : sim_(sim), phy_(std::move(phy)), retry_limit_(retry_limit), trace_(trace) {
  phy_.validate();
  if (retry_limit_ < 1) throw ConfigError("retry limit must be >= 1");
}

int WirelessChannel::add_host(std::size_t capacity_per_ac, const AcParamSet& params) {
  hosts_.push_back(Host{{AcQueue(0, capacity_per_ac, params[0]), AcQueue(1, capacity_per_ac, params[1]),
                         AcQueue(2, capacity_per_ac, params[2]), AcQueue(3, capacity_per_ac, params[3])}});
  accesses_.push_back(0);
  successful_accesses_.push_back(0);
  return static_cast<int>(hosts_.size()) - 1;
}

void WirelessChannel::set_params(int host, int ac, const EdcaParams& p) {
  queue(host, ac).set_params(p);
  if (!busy_) {
    // AIFSN changes shift the countdown start of the current idle period.
    AcQueue& q = queue(host, ac);
    if (q.backoff_pending && q.countdown.start_slot < p.aifsn) q.countdown.start_slot = p.aifsn;
    reschedule();
  }
}

int WirelessChannel::slot_index_ceil(SimTime t) const {
  const SimTime rel = t - idle_start_ - phy_.sifs;
  if (rel <= 0) return 0;
  return static_cast<int>((rel + phy_.slot_time - 1) / phy_.slot_time);
}

void WirelessChannel::trace_frame(const Frame& f, int host, TraceEvent ev, DropReason reason, SimTime t) {
  if (trace_ == nullptr) return;
  TraceRecord r;
  r.time = t;
  r.enqueue_time = f.enqueue_time;
  r.flow_id = f.flow_id;
  r.station = f.station_id;
  r.host = host;
  r.bytes = f.bytes;
  r.ac = static_cast<std::uint8_t>(f.ac);
  r.event = ev;
  r.reason = reason;
  r.direction = f.direction;
  r.kind = f.kind;
  trace_->add(r);
}

bool WirelessChannel::enqueue(int host, Frame frame) {
  const SimTime now = sim_.now();
  if (frame.ac < 0 || frame.ac >= kNumAcs) throw ContractViolation("frame access category out of range");
  AcQueue& q = queue(host, frame.ac);
  frame.enqueue_time = now;
  if (!q.push(frame, now)) {
    trace_frame(frame, host, TraceEvent::Dropped, DropReason::BufferOverflow, now);
    if (drop_) drop_(host, frame, DropReason::BufferOverflow);
    return false;
  }
  trace_frame(frame, host, TraceEvent::Enqueued, DropReason::None, now);
  if (q.size() > 1) return true;

  // The AC just became a contender.
  if (busy_ || now <= idle_start_) {
    // Medium busy at arrival: a backoff is required.
    if (!q.backoff_pending) q.draw_backoff(sim_.rng());
    if (!busy_) q.countdown.restart();
  } else {
    const int k_now = slot_index_ceil(now);
    if (q.backoff_pending && q.countdown.transmit_slot() < k_now) {
      q.backoff_pending = false;  // post-backoff already ran out
    }
    if (!q.backoff_pending) {
      // Idle medium and no backoff left: access as soon as AIFS completes.
      q.backoff_pending = true;
      q.countdown.backoff = 0;
      q.countdown.start_slot = std::max(q.countdown.aifsn, k_now);
    }
  }
  if (!busy_) reschedule();
  return true;
}

void WirelessChannel::reschedule() {
  if (busy_) return;
  int best = std::numeric_limits<int>::max();
  for (Host& h : hosts_) {
    for (AcQueue& q : h.acs) {
      if (!q.empty() && q.backoff_pending) best = std::min(best, q.countdown.transmit_slot());
    }
  }
  if (best == std::numeric_limits<int>::max()) {
    sim_.cancel(pending_tx_);
    pending_tx_ = {};
    pending_slot_ = -1;
    return;
  }
  if (best == pending_slot_ && sim_.pending(pending_tx_)) return;
  sim_.cancel(pending_tx_);
  const SimTime at = std::max(slot_time_of(best), sim_.now());
  pending_slot_ = best;
  pending_tx_ = sim_.schedule(at, [this, best] { on_transmit_slot(best); });
}

void WirelessChannel::on_transmit_slot(int slot) {
  pending_tx_ = {};
  pending_slot_ = -1;
  const SimTime now = sim_.now();

  std::vector<Contender> contenders;
  for (int h = 0; h < static_cast<int>(hosts_.size()); ++h) {
    for (int ac = 0; ac < kNumAcs; ++ac) {
      const AcQueue& q = hosts_[h].acs[ac];
      if (!q.empty() && q.backoff_pending && q.countdown.transmit_slot() == slot) contenders.push_back({h, ac});
    }
  }
  if (contenders.empty()) {
    reschedule();
    return;
  }
  for (int h = 0; h < static_cast<int>(hosts_.size()); ++h) {
    for (int ac = 0; ac < kNumAcs; ++ac) {
      AcQueue& q = hosts_[h].acs[ac];
      if (!q.backoff_pending) continue;
      const bool contending = std::any_of(contenders.begin(), contenders.end(),
                                          [&](const Contender& c) { return c.host == h && c.ac == ac; });
      if (contending) continue;
      q.countdown.freeze_at(slot);
      if (q.empty() && q.countdown.backoff == 0) q.backoff_pending = false;
    }
  }

  const SlotOutcome outcome = resolve_slot(contenders, phy_.per, sim_.rng());
  busy_ = true;
  for (const Contender& c : outcome.internal_losers) apply_attempt(c.host, c.ac, TxOutcome::Failure);

  in_flight_.clear();
  SimTime duration = 0;
  if (outcome.kind == SlotOutcome::Kind::Collision) {
    ++stats_.collisions;
    for (const Contender& c : outcome.on_air) {
      Frame& head = queue(c.host, c.ac).head();
      if (head.first_tx_time < 0) head.first_tx_time = now;
      duration = std::max(duration, compute_t_exc(phy_, head.bytes));
      in_flight_.push_back(InFlight{c, 0, true, {}});
      ++accesses_[c.host];
    }
  } else {
    const Contender c = outcome.on_air.front();
    AcQueue& q = queue(c.host, c.ac);
    ++accesses_[c.host];
    InFlight f{c, 0, false, {}};
    if (outcome.kind == SlotOutcome::Kind::FrameError) {
      ++stats_.frame_errors;
      Frame& head = q.head();
      if (head.first_tx_time < 0) head.first_tx_time = now;
      duration = compute_t_exc(phy_, head.bytes);
      f.failed = true;
    } else {
      std::vector<int> sizes;
      for (const Frame& fr : q.frames()) {
        if (sizes.size() >= kMaxBurstScan) break;
        sizes.push_back(fr.bytes);
      }
      const std::size_t planned = plan_txop(sizes, q.params().txop_limit, phy_);
      for (std::size_t i = 0; i < planned; ++i) {
        if (i > 0) duration += phy_.sifs;
        Frame& fr = q.at(i);
        if (fr.first_tx_time < 0) fr.first_tx_time = now + duration;
        duration += compute_t_exc(phy_, fr.bytes);
        if (i > 0 && sim_.rng().bernoulli(phy_.per)) {
          ++stats_.frame_errors;
          f.failed = true;
          break;
        }
        f.completion.push_back(now + duration);
        ++f.frames_ok;
      }
    }
    in_flight_.push_back(std::move(f));
  }
  ++stats_.transmissions;
  stats_.busy_time += duration;
  sim_.schedule(now + duration, [this] { on_busy_end(); });
}

void WirelessChannel::apply_attempt(int host, int ac, TxOutcome outcome) {
  AcQueue& q = queue(host, ac);
  if (q.on_attempt(outcome, retry_limit_, sim_.rng())) {
    Frame dropped = q.pop_head(sim_.now());
    trace_frame(dropped, host, TraceEvent::Dropped, DropReason::RetryLimit, sim_.now());
    if (drop_) drop_(host, dropped, DropReason::RetryLimit);
  }
}

void WirelessChannel::on_busy_end() {
  const SimTime now = sim_.now();
  busy_ = false;
  idle_start_ = now;

  std::vector<std::pair<int, Frame>> delivered;
  for (InFlight& f : in_flight_) {
    AcQueue& q = queue(f.who.host, f.who.ac);
    for (std::size_t i = 0; i < f.frames_ok; ++i) {
      Frame fr = q.pop_head(now);
      fr.delivery_time = f.completion[i];
      trace_frame(fr, f.who.host, TraceEvent::Delivered, DropReason::None, fr.delivery_time);
      ++stats_.delivered;
      delivered.emplace_back(f.who.host, std::move(fr));
    }
    if (f.frames_ok > 0) ++successful_accesses_[f.who.host];
    apply_attempt(f.who.host, f.who.ac, f.failed ? TxOutcome::Failure : TxOutcome::Success);
  }
  in_flight_.clear();

  for (Host& h : hosts_) {
    for (AcQueue& q : h.acs) {
      if (q.backoff_pending) q.countdown.restart();
    }
  }
  if (deliver_) {
    for (const auto& [host, fr] : delivered) deliver_(host, fr);
  }
  reschedule();
}

}  // namespace edcafair::mac

#include "edcafair/traffic/tcp.hpp"

#include <algorithm>
#include <cmath>

namespace edcafair::traffic {

std::int64_t TcpConnState::window_room() const {
  const auto window = static_cast<std::int64_t>(std::floor(std::min(cwnd, static_cast<double>(adv_window))));
  return std::max<std::int64_t>(0, window - in_flight());
}

TcpConnState make_tcp_state(int adv_window, const TcpTimers& timers) {
  TcpConnState s;
  s.adv_window = adv_window;
  s.ssthresh = static_cast<double>(adv_window);
  s.rto = timers.rto_initial;
  s.rto_min = timers.rto_min;
  s.rto_max = timers.rto_max;
  return s;
}

namespace {

void sample_rtt(TcpConnState& s, SimTime sample) {
  const double r = static_cast<double>(sample);
  if (!s.has_rtt) {
    s.srtt = r;
    s.rttvar = r / 2.0;
    s.has_rtt = true;
  } else {
    s.rttvar = 0.75 * s.rttvar + 0.25 * std::abs(s.srtt - r);
    s.srtt = 0.875 * s.srtt + 0.125 * r;
  }
  const auto rto = static_cast<SimTime>(std::ceil(s.srtt + 4.0 * s.rttvar));
  s.rto = std::clamp(rto, s.rto_min, s.rto_max);
}

}  // namespace

AckResult tcp_on_ack(TcpConnState& s, std::int64_t cum_ack, SimTime now) {
  AckResult res;
  if (cum_ack < s.highest_ack) {
    ++s.stale_acks;
    res.stale = true;
    return res;
  }
  if (cum_ack == s.highest_ack) {
    if (s.in_flight() > 0) {
      ++s.dupacks;
      if (s.dupacks == 3) {
        s.ssthresh = std::max(static_cast<double>(s.in_flight()) / 2.0, 2.0);
        s.cwnd = s.ssthresh;
        s.timed_seq.reset();
        res.fast_retransmit = true;
      }
    }
    return res;
  }
  res.newly_acked = cum_ack - s.highest_ack;
  s.highest_ack = cum_ack;
  s.next_seq = std::max(s.next_seq, s.highest_ack);
  s.dupacks = 0;
  if (s.timed_seq && cum_ack > *s.timed_seq) {
    sample_rtt(s, now - s.timed_at);
    s.timed_seq.reset();
  }
  if (s.cwnd < s.ssthresh) {
    s.cwnd += 1.0;
  } else {
    s.cwnd += 1.0 / s.cwnd;
  }
  s.cwnd = std::min(s.cwnd, static_cast<double>(s.adv_window));
  return res;
}

bool tcp_on_timeout(TcpConnState& s) {
  if (s.in_flight() <= 0) return false;
  s.ssthresh = std::max(static_cast<double>(s.in_flight()) / 2.0, 2.0);
  s.cwnd = 1.0;
  s.next_seq = s.highest_ack;
  s.dupacks = 0;
  s.timed_seq.reset();
  s.rto = std::min(s.rto * 2, s.rto_max);
  return true;
}

void tcp_on_send(TcpConnState& s, std::int64_t seq, bool retransmission, SimTime now) {
  if (retransmission) {
    s.timed_seq.reset();
    return;
  }
  if (!s.timed_seq) {
    s.timed_seq = seq;
    s.timed_at = now;
  }
}

TcpReceiver::Action TcpReceiver::on_data(std::int64_t seq) {
  Action a;
  if (seq < expected_ || out_of_order_.contains(seq)) {
    ++duplicates_;
    a.ack_now = expected_;
    pending_ = 0;
    return a;
  }
  if (seq > expected_) {
    out_of_order_.insert(seq);
    a.ack_now = expected_;
    pending_ = 0;
    return a;
  }
  ++expected_;
  bool filled_gap = false;
  while (!out_of_order_.empty() && *out_of_order_.begin() == expected_) {
    out_of_order_.erase(out_of_order_.begin());
    ++expected_;
    filled_gap = true;
  }
  ++pending_;
  if (filled_gap || pending_ >= delack_) {
    a.ack_now = expected_;
    pending_ = 0;
    return a;
  }
  if (!timer_armed_) {
    timer_armed_ = true;
    a.arm_timer = true;
  }
  return a;
}

std::optional<std::int64_t> TcpReceiver::on_timer() {
  timer_armed_ = false;
  if (pending_ == 0) return std::nullopt;
  pending_ = 0;
  return expected_;
}

}  // namespace edcafair::traffic

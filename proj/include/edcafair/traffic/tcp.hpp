#pragma once

#include <cstdint>
#include <optional>
#include <set>

#include "edcafair/sim/time.hpp"

namespace edcafair::traffic {

inline constexpr int kTcpAckBytes = 40;

struct TcpTimers {
  SimTime rto_initial = 1 * kMicrosPerSecond;
  SimTime rto_min = 200 * kMicrosPerMilli;
  SimTime rto_max = 60 * kMicrosPerSecond;
  SimTime delack_timeout = 100 * kMicrosPerMilli;
};

/// Sender side of the simplified window TCP. Sequence numbers count packets;
/// `highest_ack` is the cumulative ack, i.e. the next packet the receiver
/// expects.
struct TcpConnState {
  double cwnd = 1.0;
  double ssthresh = 64.0;
  int adv_window = 42;
  std::int64_t next_seq = 0;
  std::int64_t highest_ack = 0;
  int dupacks = 0;
  std::uint64_t stale_acks = 0;

  SimTime rto = 1 * kMicrosPerSecond;
  SimTime rto_min = 200 * kMicrosPerMilli;
  SimTime rto_max = 60 * kMicrosPerSecond;
  double srtt = 0.0;
  double rttvar = 0.0;
  bool has_rtt = false;
  std::optional<std::int64_t> timed_seq;
  SimTime timed_at = 0;

  std::int64_t in_flight() const { return next_seq - highest_ack; }
  /// Packets the window currently allows beyond those in flight.
  std::int64_t window_room() const;
};

TcpConnState make_tcp_state(int adv_window, const TcpTimers& timers);

struct AckResult {
  std::int64_t newly_acked = 0;
  bool stale = false;
  bool fast_retransmit = false;  ///< caller resends packet highest_ack
};

/// Cumulative ACK arrival. Slides the window, grows cwnd (+1 per ACK in slow
/// start, +1/cwnd in congestion avoidance, capped at adv_window), samples
/// RTT, and flags a fast retransmit on the third duplicate.
AckResult tcp_on_ack(TcpConnState& s, std::int64_t cum_ack, SimTime now);

/// Retransmission timeout: ssthresh = max(in_flight/2, 2), cwnd = 1, the
/// sender restarts from the oldest unacked packet and the RTO doubles up to
/// its cap. Returns false (no change) with nothing in flight.
bool tcp_on_timeout(TcpConnState& s);

/// Records a packet transmission for RTT timing (Karn's rule on retransmits).
void tcp_on_send(TcpConnState& s, std::int64_t seq, bool retransmission, SimTime now);

/// Receiver with cumulative ACKs and a delayed-ACK factor.
class TcpReceiver {
 public:
  explicit TcpReceiver(int delack = 1) : delack_(delack < 1 ? 1 : delack) {}

  struct Action {
    std::optional<std::int64_t> ack_now;  ///< cumulative ack to emit now
    bool arm_timer = false;               ///< start the delayed-ACK timer
  };

  Action on_data(std::int64_t seq);
  /// Delayed-ACK timer expiry; emits the pending ACK if any.
  std::optional<std::int64_t> on_timer();

  std::int64_t expected() const { return expected_; }
  int pending() const { return pending_; }
  std::uint64_t duplicates() const { return duplicates_; }

 private:
  int delack_;
  std::int64_t expected_ = 0;
  int pending_ = 0;
  bool timer_armed_ = false;
  std::set<std::int64_t> out_of_order_;
  std::uint64_t duplicates_ = 0;
};

}  // namespace edcafair::traffic

#pragma once

#include <cstdint>
#include <deque>

#include "edcafair/mac/contention.hpp"
#include "edcafair/mac/edca.hpp"
#include "edcafair/trace.hpp"

namespace edcafair::mac {

/// MAC data unit.
struct Frame {
  std::uint64_t uid = 0;
  int flow_id = -1;
  int station_id = -1;
  int bytes = 1500;
  Direction direction = Direction::Uplink;
  FrameKind kind = FrameKind::Data;
  std::int64_t seq = 0;  ///< data sequence number or cumulative ack number
  int ac = 0;
  SimTime enqueue_time = -1;
  SimTime first_tx_time = -1;
  SimTime delivery_time = -1;
};

/// Transmit queue and backoff entity of one access category.
class AcQueue {
 public:
  AcQueue(int ac, std::size_t capacity, const EdcaParams& params);

  int ac() const { return ac_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  bool full() const { return frames_.size() >= capacity_; }

  /// False (and no change) when the buffer is full.
  bool push(const Frame& f, SimTime now);
  Frame& head() { return frames_.front(); }
  Frame& at(std::size_t i) { return frames_.at(i); }
  const std::deque<Frame>& frames() const { return frames_; }
  Frame pop_head(SimTime now);

  const EdcaParams& params() const { return params_; }
  /// Takes effect immediately; the current window is clamped into range.
  void set_params(const EdcaParams& p);

  int current_cw() const { return cw_; }
  int retries() const { return retries_; }

  /// BEB update after an attempt plus a fresh backoff draw in [0, cw].
  /// Returns true when the head frame exhausted its retry limit and must be
  /// discarded by the caller.
  bool on_attempt(TxOutcome outcome, int retry_limit, sim::RandomSource& rng);

  /// Draws a backoff from the current window (arrival at a busy medium).
  void draw_backoff(sim::RandomSource& rng);

  Countdown countdown;
  bool backoff_pending = false;

  /// Time-weighted queue length statistics since the last reset.
  double mean_length(SimTime now) const;
  void reset_length_stats(SimTime now);

 private:
  void account(SimTime now);

  int ac_;
  std::size_t capacity_;
  EdcaParams params_;
  int cw_;
  int retries_ = 0;
  std::deque<Frame> frames_;

  SimTime stats_start_ = 0;
  SimTime last_change_ = 0;
  double length_integral_ = 0.0;
};

}  // namespace edcafair::mac

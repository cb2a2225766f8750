#pragma once

#include <array>
#include <functional>
#include <vector>

#include "edcafair/mac/ac_queue.hpp"
#include "edcafair/mac/phy.hpp"
#include "edcafair/sim/simulator.hpp"
#include "edcafair/trace.hpp"

namespace edcafair::mac {

inline constexpr int kApHost = 0;

struct MacStats {
  std::uint64_t transmissions = 0;  ///< channel accesses won (bursts started)
  std::uint64_t collisions = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t delivered = 0;
  SimTime busy_time = 0;
};

/// Shared single-cell channel with per-host EDCA functions.
///
/// Idealized slotted medium: every host sees busy/idle transitions at the
/// same instant, colliding frames are all lost, and frames inside a TXOP
/// are protected. MAC ACKs never fail; PER applies to data exchanges only.
class WirelessChannel {
 public:
  using DeliveryHandler = std::function<void(int host, const Frame&)>;
  using DropHandler = std::function<void(int host, const Frame&, DropReason)>;

  WirelessChannel(sim::Simulator& sim, PhyProfile phy, int retry_limit, Trace* trace);

  WirelessChannel(const WirelessChannel&) = delete;
  WirelessChannel& operator=(const WirelessChannel&) = delete;

  /// Host 0 must be added first and is the AP.
  int add_host(std::size_t capacity_per_ac, const AcParamSet& params);
  std::size_t host_count() const { return hosts_.size(); }

  /// Enqueues at `host`; returns false on buffer overflow (traced as drop).
  bool enqueue(int host, Frame frame);

  void set_params(int host, int ac, const EdcaParams& p);
  const EdcaParams& params(int host, int ac) const { return queue(host, ac).params(); }

  AcQueue& queue(int host, int ac) { return hosts_.at(host).acs.at(ac); }
  const AcQueue& queue(int host, int ac) const { return hosts_.at(host).acs.at(ac); }

  void on_delivered(DeliveryHandler h) { deliver_ = std::move(h); }
  void on_dropped(DropHandler h) { drop_ = std::move(h); }

  const PhyProfile& phy() const { return phy_; }
  const MacStats& stats() const { return stats_; }
  /// Per-host count of channel accesses won (including collided ones).
  const std::vector<std::uint64_t>& accesses() const { return accesses_; }
  /// Per-host count of successful bursts.
  const std::vector<std::uint64_t>& successful_accesses() const { return successful_accesses_; }
  bool busy() const { return busy_; }

 private:
  struct Host {
    std::array<AcQueue, kNumAcs> acs;
  };

  struct InFlight {
    Contender who;
    std::size_t frames_ok = 0;
    bool failed = false;  // head-of-burst frame (or the one after frames_ok) failed
    std::vector<SimTime> completion;
  };

  int slot_index_ceil(SimTime t) const;
  SimTime slot_time_of(int k) const { return idle_start_ + phy_.sifs + k * phy_.slot_time; }
  void reschedule();
  void on_transmit_slot(int slot);
  void on_busy_end();
  void apply_attempt(int host, int ac, TxOutcome outcome);
  void trace_frame(const Frame& f, int host, TraceEvent ev, DropReason reason, SimTime t);

  sim::Simulator& sim_;
  PhyProfile phy_;
  int retry_limit_;
  Trace* trace_;
  std::vector<Host> hosts_;

  bool busy_ = false;
  SimTime idle_start_ = 0;
  sim::EventId pending_tx_;
  int pending_slot_ = -1;
  std::vector<InFlight> in_flight_;

  DeliveryHandler deliver_;
  DropHandler drop_;
  MacStats stats_;
  std::vector<std::uint64_t> accesses_;
  std::vector<std::uint64_t> successful_accesses_;
};

}  // namespace edcafair::mac

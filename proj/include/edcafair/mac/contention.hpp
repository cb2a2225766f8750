#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edcafair/mac/phy.hpp"
#include "edcafair/sim/random.hpp"

namespace edcafair::mac {

/// Slot bookkeeping of one AC within an idle period.
///
/// Slot k of an idle period begins at idle_start + SIFS + k * slot_time. An
/// AC starts decrementing its backoff at `start_slot` (normally its AIFSN,
/// i.e. after AIFS = SIFS + AIFSN * slot of idle medium) and transmits in
/// slot start_slot + backoff.
struct Countdown {
  int aifsn = 3;
  int backoff = 0;
  int start_slot = 3;

  int transmit_slot() const { return start_slot + backoff; }

  /// Another host grabbed the medium in slot `busy_slot`: the slots counted
  /// so far are consumed and the counter freezes.
  void freeze_at(int busy_slot);

  /// A new idle period begins; AIFS must complete again before counting.
  void restart() { start_slot = aifsn; }
};

/// A candidate whose counter expired in the current slot.
struct Contender {
  int host = 0;
  int ac = 0;
};

struct SlotOutcome {
  enum class Kind : std::uint8_t { Success, Collision, FrameError };
  Kind kind = Kind::Success;
  /// One entry per host that put a frame on the air (its highest AC).
  std::vector<Contender> on_air;
  /// ACs that lost an internal (same host) collision.
  std::vector<Contender> internal_losers;
};

/// Resolves the ACs whose counters expire in the same slot. Within one host
/// the highest AC wins the virtual collision. A single external transmitter
/// succeeds unless the PER draw fails its frame. Requires nonempty input.
SlotOutcome resolve_slot(std::span<const Contender> contenders, double per, sim::RandomSource& rng);

/// Number of queued frames (given their payload sizes, in queue order) sent in
/// one TXOP. Frames are taken while the summed exchange durations stay within
/// the limit; at least one frame is always sent, and a zero limit means
/// exactly one.
std::size_t plan_txop(std::span<const int> payload_bytes, SimTime txop_limit, const PhyProfile& phy);

/// Channel occupancy of a burst of `frames` exchanges separated by SIFS.
SimTime burst_duration(std::span<const int> payload_bytes, std::size_t frames, const PhyProfile& phy);

}  // namespace edcafair::mac

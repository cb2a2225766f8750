#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "edcafair/trace.hpp"

namespace edcafair::metrics {

/// Jain's index (sum x)^2 / (n sum x^2). Throws ContractViolation on an
/// empty list, a negative entry, or all zeros.
double jain_index(std::span<const double> x);

/// drops / arrivals; absent with no arrivals.
std::optional<double> packet_loss_rate(std::uint64_t arrivals, std::uint64_t drops);

struct DelayJitter {
  std::optional<double> mean_delay_us;
  std::optional<double> jitter_us;  ///< mean |d_k - d_{k-1}|
  std::size_t samples = 0;
};

/// Delays in delivery order.
DelayJitter delay_jitter(std::span<const double> delays_us);

/// Data deliveries of one flow at or after `from`.
DelayJitter flow_delay_jitter(const Trace& trace, int flow_id, SimTime from);

/// Mean uplink successes over mean downlink successes; absent if either
/// side is empty or the downlink mean is zero.
std::optional<double> access_ratio(std::span<const double> up_successes, std::span<const double> down_successes);

struct Completion {
  int flow_id = -1;
  int station_id = -1;
  Direction direction = Direction::Uplink;
  SimTime start = 0;
  std::optional<SimTime> duration;  ///< empty when censored
};

/// Short-flow completion times from FlowStart/FlowComplete records of the
/// given flows; flows that never complete are censored.
std::vector<Completion> completion_times(const Trace& trace, std::span<const int> flow_ids);

struct ThroughputSample {
  int station_id = 0;
  Direction direction = Direction::Uplink;
  SimTime window_start = 0;
  SimTime window_end = 0;
  std::uint64_t delivered_bits = 0;
};

/// Per (station, data direction) delivered data bits in consecutive
/// windows over [0, end). Every station that delivers anything gets a row
/// for every window.
std::vector<ThroughputSample> throughput_series(const Trace& trace, SimTime window, SimTime end);

/// Data-frame accounting of one (station, direction) at its MAC queue.
struct StationTotals {
  int station_id = 0;
  Direction direction = Direction::Uplink;
  std::uint64_t arrivals = 0;  ///< frames offered to the MAC queue (accepted or not)
  std::uint64_t drops = 0;     ///< overflow + filter losses, plus retry-limit losses at the AP
  std::uint64_t retry_drops = 0;  ///< retry-limit losses at a station's own MAC (not in PLR)
  std::uint64_t delivered_frames = 0;
  std::uint64_t delivered_bits = 0;
  bool saturated = false;

  double throughput_bps(SimTime span) const;
};

using StationKey = std::pair<int, Direction>;

/// Totals of data frames in access category `ac` recorded in [from, to).
std::map<StationKey, StationTotals> station_totals(const Trace& trace, int ac, SimTime from, SimTime to);

struct FairnessReport {
  std::optional<double> jain_f;          ///< over the saturated set's throughputs
  std::optional<double> mean_plr_nonsat;  ///< mean PLR over the nonsaturated set
  std::vector<StationTotals> stations;
  std::size_t n_saturated = 0;
};

/// Two-part fairness measure for one AC. `saturated` lists the members of
/// the saturated set; everything else counts as nonsaturated.
FairnessReport fairness_report(const Trace& trace, int ac, SimTime from, SimTime to,
                               const std::vector<StationKey>& saturated);

}  // namespace edcafair::metrics

#pragma once

#include <string>

#include "edcafair/sim/time.hpp"

namespace edcafair::mac {

/// PHY timing and loss description. All durations in microseconds.
///
/// `phy_overhead` covers the PLCP preamble/header and the MAC header/FCS of a
/// data frame; `ack_duration` is the MAC ACK at the basic rate.
struct PhyProfile {
  std::string name = "802.11g";
  double data_rate = 54e6;
  double basic_rate = 6e6;
  SimTime slot_time = 9;
  SimTime sifs = 10;
  SimTime phy_overhead = 26;
  SimTime ack_duration = 44;
  double per = 0.0;

  void validate() const;

  /// 54 Mb/s data, 6 Mb/s basic rate.
  static PhyProfile ieee80211g();
  /// 11 Mb/s data, 2 Mb/s basic rate, long preamble.
  static PhyProfile ieee80211b();

  friend bool operator==(const PhyProfile&, const PhyProfile&) = default;
};

/// Duration of one data frame exchange (data + SIFS + ACK), rounded up to
/// whole microseconds. Throws ContractViolation for payload <= 0.
SimTime compute_t_exc(const PhyProfile& phy, int payload_bytes);

}  // namespace edcafair::mac

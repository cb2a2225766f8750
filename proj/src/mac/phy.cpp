#include "edcafair/mac/phy.hpp"

#include <cmath>

#include "edcafair/errors.hpp"

namespace edcafair::mac {

void PhyProfile::validate() const {
  if (!(per >= 0.0 && per <= 1.0)) throw ConfigError("per must lie in [0, 1]");
  if (data_rate <= 0 || basic_rate <= 0) throw ConfigError("phy rates must be positive");
  if (slot_time <= 0 || sifs <= 0 || phy_overhead <= 0 || ack_duration <= 0) {
    throw ConfigError("phy durations must be positive");
  }
}

PhyProfile PhyProfile::ieee80211g() { return PhyProfile{}; }

PhyProfile PhyProfile::ieee80211b() {
  PhyProfile p;
  p.name = "802.11b";
  p.data_rate = 11e6;
  p.basic_rate = 2e6;
  p.slot_time = 20;
  p.sifs = 10;
  p.phy_overhead = 218;  // 192 us long preamble + MAC header/FCS at 11 Mb/s
  p.ack_duration = 248;  // 192 us preamble + 14 byte ACK at 2 Mb/s
  return p;
}

SimTime compute_t_exc(const PhyProfile& phy, int payload_bytes) {
  if (payload_bytes <= 0) throw ContractViolation("payload must be positive");
  const double airtime = static_cast<double>(payload_bytes) * 8.0 * 1e6 / phy.data_rate;
  const double total = static_cast<double>(phy.phy_overhead + phy.sifs + phy.ack_duration) + airtime;
  // Guard against representation noise before rounding up.
  return static_cast<SimTime>(std::ceil(total - 1e-9));
}

}  // namespace edcafair::mac

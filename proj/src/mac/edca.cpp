#include "edcafair/mac/edca.hpp"

#include <algorithm>
#include <string>

#include "edcafair/errors.hpp"

namespace edcafair::mac {

void EdcaParams::validate() const {
  if (aifsn < 1) {
    throw ConfigError("aifsn must be >= 1, got " + std::to_string(aifsn));
  }
  if (cw_min < 1 || cw_min > cw_max) {
    throw ConfigError("need 1 <= cw_min <= cw_max, got cw_min=" + std::to_string(cw_min) +
                      " cw_max=" + std::to_string(cw_max));
  }
  if (txop_limit < 0) {
    throw ConfigError("txop limit must be >= 0");
  }
}

AcParamSet default_ac_params() {
  AcParamSet set;
  set[0] = EdcaParams{3, 31, 511, 0};
  set[1] = EdcaParams{3, 31, 511, 0};
  set[2] = EdcaParams{2, 15, 31, 3008};
  set[3] = EdcaParams{2, 7, 15, 1504};
  return set;
}

bool is_exponent_form(int cw) {
  if (cw < 0 || cw > 32767) return false;
  const unsigned v = static_cast<unsigned>(cw) + 1u;
  return (v & (v - 1u)) == 0u;
}

int next_contention_window(int current_cw, const EdcaParams& p, TxOutcome outcome) {
  if (outcome == TxOutcome::Success) {
    return p.cw_min;
  }
  const long doubled = 2L * (static_cast<long>(current_cw) + 1L) - 1L;
  return static_cast<int>(std::clamp<long>(doubled, p.cw_min, p.cw_max));
}

std::uint8_t encode_cw_exponent(int cw) {
  if (!is_exponent_form(cw)) {
    throw ContractViolation("station contention window " + std::to_string(cw) +
                            " is not of the form 2^k - 1 with k <= 15");
  }
  std::uint8_t k = 0;
  while ((1 << k) - 1 != cw) ++k;
  return k;
}

int decode_cw_exponent(std::uint8_t exponent) {
  if (exponent > 15) {
    throw ContractViolation("cw exponent exceeds 4 bits");
  }
  return (1 << exponent) - 1;
}

EdcaParamRecord encode_param_record(int ac, const EdcaParams& p) {
  if (ac < 0 || ac >= kNumAcs) throw ContractViolation("access category out of range");
  if (p.aifsn < 1 || p.aifsn > 15) throw ContractViolation("aifsn does not fit the 4-bit field");
  EdcaParamRecord r;
  r.aci_aifsn = static_cast<std::uint8_t>((ac << 5) | p.aifsn);
  r.ecw = static_cast<std::uint8_t>((encode_cw_exponent(p.cw_max) << 4) | encode_cw_exponent(p.cw_min));
  const SimTime units = (p.txop_limit + kTxopUnit - 1) / kTxopUnit;
  if (units > 0xFFFF) throw ContractViolation("txop limit does not fit the 16-bit field");
  r.txop_units = static_cast<std::uint16_t>(units);
  return r;
}

EdcaParams decode_param_record(const EdcaParamRecord& r) {
  EdcaParams p;
  p.aifsn = r.aci_aifsn & 0x0F;
  p.cw_min = decode_cw_exponent(r.ecw & 0x0F);
  p.cw_max = decode_cw_exponent(static_cast<std::uint8_t>(r.ecw >> 4));
  p.txop_limit = static_cast<SimTime>(r.txop_units) * kTxopUnit;
  return p;
}

BeaconParameterSet encode_beacon(const AcParamSet& station_params) {
  BeaconParameterSet b;
  for (int ac = 0; ac < kNumAcs; ++ac) {
    b.records[ac] = encode_param_record(ac, station_params[ac]);
  }
  return b;
}

AcParamSet decode_beacon(const BeaconParameterSet& beacon) {
  AcParamSet set;
  for (const auto& r : beacon.records) {
    const int ac = (r.aci_aifsn >> 5) & 0x03;
    set[ac] = decode_param_record(r);
  }
  return set;
}

}  // namespace edcafair::mac

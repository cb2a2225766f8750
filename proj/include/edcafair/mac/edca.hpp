#pragma once

#include <array>
#include <cstdint>

#include "edcafair/sim/time.hpp"

namespace edcafair::mac {

inline constexpr int kNumAcs = 4;

/// Contention parameters of one access category.
struct EdcaParams {
  int aifsn = 3;
  int cw_min = 31;
  int cw_max = 511;
  SimTime txop_limit = 0;  ///< 0 means one frame exchange per access

  /// Throws ConfigError when 1 <= cw_min <= cw_max or aifsn >= 1 is broken.
  void validate() const;

  friend bool operator==(const EdcaParams&, const EdcaParams&) = default;
};

using AcParamSet = std::array<EdcaParams, kNumAcs>;

/// Defaults used throughout: AC0/AC1 best effort, AC2 video, AC3 voice.
AcParamSet default_ac_params();

/// True if cw = 2^k - 1 with k in [0, 15].
bool is_exponent_form(int cw);

/// Window size after a failed or successful attempt:
/// success resets to cw_min, failure doubles (2(cw+1)-1) up to cw_max.
enum class TxOutcome : std::uint8_t { Success, Failure };
int next_contention_window(int current_cw, const EdcaParams& p, TxOutcome outcome);

/// One AC parameter record as carried in the beacon EDCA Parameter Set.
struct EdcaParamRecord {
  std::uint8_t aci_aifsn = 0;  ///< bits 0-3 AIFSN, bits 5-6 ACI
  std::uint8_t ecw = 0;        ///< bits 0-3 ECWmin, bits 4-7 ECWmax
  std::uint16_t txop_units = 0;  ///< TXOP limit in 32 us units

  friend bool operator==(const EdcaParamRecord&, const EdcaParamRecord&) = default;
};

inline constexpr SimTime kTxopUnit = 32;

/// 4-bit exponent for cw = 2^k - 1. Throws ContractViolation otherwise.
std::uint8_t encode_cw_exponent(int cw);
int decode_cw_exponent(std::uint8_t exponent);

/// Station-side parameters must be exponent form; violations throw
/// ContractViolation. TXOP limits are rounded up to whole 32 us units.
EdcaParamRecord encode_param_record(int ac, const EdcaParams& p);
EdcaParams decode_param_record(const EdcaParamRecord& r);

struct BeaconParameterSet {
  std::array<EdcaParamRecord, kNumAcs> records{};
};

BeaconParameterSet encode_beacon(const AcParamSet& station_params);
AcParamSet decode_beacon(const BeaconParameterSet& beacon);

}  // namespace edcafair::mac

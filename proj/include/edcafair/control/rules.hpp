#pragma once

#include <optional>
#include <string_view>
#include <span>
#include <string>
#include <vector>

#include "edcafair/trace.hpp"

namespace edcafair::control {

/// x_t = delta * y + (1 - delta) * x_{t-1}. Requires 0 <= delta <= 1.
double ema_update(double prev, double observation, double delta);

/// Per-station demand as seen at the AP over the last interval (EMA):
/// uplink stations by their successful transmissions, downlink stations by
/// packets arriving at the AP from the wired side.
struct StationDemand {
  Direction direction = Direction::Uplink;
  double demand = 0.0;
};

struct Classification {
  std::vector<bool> saturated;  ///< parallel to the input
  double c_fair = 0.0;
  double c_nonsat = 0.0;
  double c_nonsat_down = 0.0;
  int n_sat = 0;
  int n_sat_up = 0;
  int n_sat_down = 0;
  int iterations = 0;
  bool degenerate = false;  ///< nobody saturated; c_fair fell back to C/n
};

/// Iterative saturated/nonsaturated labeling with the per-station fair share.
///
///  1. C_f = C / n.
///  2. Uplink stations within `band` of the highest uplink access rate are
///     saturated (applied only when that rate reaches (1 - band) * C_f).
///  3. Every other station is saturated iff its demand exceeds C_f.
///  4. C_f = (C - C_nonsat) / n_sat.
///  5. Repeat 3-4 until no label changes (at most n rounds).
///
/// Requires a nonempty input and c_total > 0.
Classification classify_stations(std::span<const StationDemand> stations, double c_total, double band);

/// (C_nonsat,d + n_sat,d * C_f) / C_f; 0 when there is no downlink demand.
double effective_downlink_udp(const Classification& c);

struct TcpHistory {
  bool valid = false;
  double cw_up = 0.0;    ///< previous-interval station CWmin per packet
  double cw_down = 0.0;  ///< previous-interval AP CWmin per packet
  double eta = 0.0;
};

/// eta = n_d + n_u / b, normalized by the previous interval:
/// e_d = cw_up^p * eta / (cw_down^p * eta^p). Falls back to eta without
/// usable history.
double tcp_eta(int n_up, int n_down, int delack);
double effective_downlink_tcp(int n_up, int n_down, int delack, const TcpHistory& history);

/// Inputs of the AP/station parameter decision for one AC.
struct DecisionInput {
  double e_d = 1.0;
  double u_target = 1.0;
  int cw_up = 31;            ///< station CWmin currently assigned
  int n_txop_up = 1;
  int n_txop_thresh = 8;
  int cw_up_cap = 127;  ///< (default CWmin + 1) * theta - 1
  int ap_cw_floor = 1;       ///< max CWmin of active higher-priority ACs at the AP
};

struct Decision {
  bool ok = false;
  int cw_down = 0;
  int n_txop_down = 0;
  int cw_up = 0;
  int doublings = 0;
  std::string warning;
};

/// Candidate AP CWmin values CW_u * N_u / (e_d * U * N_d) for N_d = 1..thresh,
/// rounded to the nearest integer (minimum 1). A pair is valid when the AP
/// window is not below `ap_cw_floor`. The smallest valid N_d >= 2 wins; when
/// none exists the station window doubles (staying 2^k - 1 and within the
/// cap) and the round repeats. N_d = 1 is used only once doubling is
/// exhausted. With no valid pair at all, ok = false.
Decision decide_params(const DecisionInput& in);

/// Rounded AP window candidate for one N_d.
int candidate_cw_down(int cw_up, int n_txop_up, double e_d, double u_target, int n_txop_down);

enum class TuneAction { None, StepHigh, StepLow, DoubledBoth, DoubledDownAndTxop, ClampedToFloor };

struct TuneInput {
  std::optional<double> u_measured;
  double u_target = 1.0;
  double alpha = 0.05;
  double gamma = 0.25;
  int chi_high = 5;
  int chi_low = 1;
  int cw_down = 31;
  int n_txop_down = 1;
  int cw_up = 31;
  int cw_up_cap = 127;
  int n_txop_thresh = 8;
  int ap_cw_floor = 1;
};

struct TuneResult {
  int cw_down = 0;
  int n_txop_down = 0;
  int cw_up = 0;
  TuneAction action = TuneAction::None;
};

/// Dead-band negative feedback on U_m - U_r: |err| <= alpha U_r does
/// nothing, |err| <= gamma U_r steps by chi_low, larger errors by chi_high.
/// U_m above target lowers the AP window (more downlink access). When the
/// window would drop below the priority floor, both windows double while the
/// station window is under its cap; otherwise the AP window and TXOP double
/// if the new N_TXOP stays within the threshold; else the window is clamped.
TuneResult tune_params(const TuneInput& in);

struct EpdaInput {
  double avg_queue = 0.0;
  double q_thresh = 5.0;  /// packets; 5% of the default 100-packet AP buffer
  int chi_low = 1;
  int cw_down = 31;
  int n_txop_down = 1;
  int cw_up = 31;
  int cw_up_cap = 127;
  int n_txop_thresh = 8;
  int ap_cw_floor = 1;
};

/// Queue-driven AP window step: above threshold lowers CWmin by chi_low,
/// below raises it, equal leaves it. Floor handling matches tune_params.
TuneResult epda_tune(const EpdaInput& in);

/// max(0, (A - C_f) / A). Requires A > 0 and C_f > 0.
double fra_drop_probability(double arrival_rate, double c_fair);

/// Next window on the 2^k - 1 ladder.
int double_window(int cw);

std::string_view to_string(TuneAction a);

}  // namespace edcafair::control

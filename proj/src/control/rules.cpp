#include "edcafair/control/rules.hpp"

#include <algorithm>
#include <cmath>

#include "edcafair/errors.hpp"

namespace edcafair::control {

namespace {

constexpr int kMaxApWindow = 2047;

}  // namespace

double ema_update(double prev, double observation, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ContractViolation("ema weight must lie in [0, 1]");
  return delta * observation + (1.0 - delta) * prev;
}

Classification classify_stations(std::span<const StationDemand> stations, double c_total, double band) {
  if (stations.empty()) throw ContractViolation("classification needs at least one station");
  if (!(c_total > 0.0)) throw ContractViolation("classification needs positive capacity");
  const auto n = static_cast<int>(stations.size());

  Classification out;
  out.saturated.assign(stations.size(), false);
  std::vector<bool> locked(stations.size(), false);
  double c_fair = c_total / n;

  double max_up = -1.0;
  for (const auto& s : stations) {
    if (s.direction == Direction::Uplink) max_up = std::max(max_up, s.demand);
  }
  if (max_up > 0.0 && max_up >= (1.0 - band) * c_fair) {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (stations[i].direction == Direction::Uplink && stations[i].demand >= (1.0 - band) * max_up) {
        out.saturated[i] = true;
        locked[i] = true;
      }
    }
  }

  auto relabel = [&](double cf) {
    bool changed = false;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (locked[i]) continue;
      const bool sat = stations[i].demand > cf;
      if (sat != out.saturated[i]) changed = true;
      out.saturated[i] = sat;
    }
    return changed;
  };

  relabel(c_fair);
  for (int round = 0; round < n; ++round) {
    ++out.iterations;
    double c_nonsat = 0.0;
    int n_sat = 0;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (out.saturated[i]) {
        ++n_sat;
      } else {
        c_nonsat += stations[i].demand;
      }
    }
    if (n_sat == 0) {
      out.degenerate = true;
      c_fair = c_total / n;
      break;
    }
    // Measurement noise can leave nonsaturated demand above the capacity;
    // keep the share positive so downstream ratios stay defined.
    c_fair = std::max((c_total - c_nonsat) / n_sat, 1e-6 * c_total / n);
    // A station using exactly the residual capacity stays saturated rather
    // than emptying the set.
    const std::vector<bool> before = out.saturated;
    if (!relabel(c_fair)) break;
    if (std::none_of(out.saturated.begin(), out.saturated.end(), [](bool b) { return b; })) {
      out.saturated = before;
      break;
    }
  }

  out.c_fair = c_fair;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const bool down = stations[i].direction == Direction::Downlink;
    if (out.saturated[i]) {
      ++out.n_sat;
      if (down) {
        ++out.n_sat_down;
      } else {
        ++out.n_sat_up;
      }
    } else {
      out.c_nonsat += stations[i].demand;
      if (down) out.c_nonsat_down += stations[i].demand;
    }
  }
  return out;
}

double effective_downlink_udp(const Classification& c) {
  if (!(c.c_fair > 0.0)) throw ContractViolation("fair share must be positive");
  return (c.c_nonsat_down + c.n_sat_down * c.c_fair) / c.c_fair;
}

double tcp_eta(int n_up, int n_down, int delack) {
  if (delack < 1) throw ContractViolation("delayed-ack factor must be >= 1");
  return n_down + static_cast<double>(n_up) / delack;
}

double effective_downlink_tcp(int n_up, int n_down, int delack, const TcpHistory& history) {
  const double eta = tcp_eta(n_up, n_down, delack);
  if (!history.valid || !(history.eta > 0.0) || !(history.cw_down > 0.0) || !(history.cw_up > 0.0)) return eta;
  return history.cw_up * eta / (history.cw_down * history.eta);
}

int candidate_cw_down(int cw_up, int n_txop_up, double e_d, double u_target, int n_txop_down) {
  if (!(e_d > 0.0) || !(u_target > 0.0) || n_txop_down < 1) {
    throw ContractViolation("window candidate needs positive e_d, target and N_TXOP");
  }
  const double raw = static_cast<double>(cw_up) * n_txop_up / (e_d * u_target * n_txop_down);
  const long rounded = std::lround(raw);
  return static_cast<int>(std::clamp<long>(rounded, 1, kMaxApWindow));
}

int double_window(int cw) { return 2 * (cw + 1) - 1; }

Decision decide_params(const DecisionInput& in) {
  Decision d;
  int cw_up = in.cw_up;
  const int thresh = std::max(1, in.n_txop_thresh);
  const int floor = std::max(1, in.ap_cw_floor);
  for (;;) {
    std::optional<int> single;
    for (int nd = 1; nd <= thresh; ++nd) {
      const int cw = candidate_cw_down(cw_up, in.n_txop_up, in.e_d, in.u_target, nd);
      if (cw < floor) continue;
      if (nd == 1) {
        single = cw;
        continue;
      }
      d.ok = true;
      d.cw_down = cw;
      d.n_txop_down = nd;
      d.cw_up = cw_up;
      return d;
    }
    const int doubled = double_window(cw_up);
    if (doubled <= in.cw_up_cap) {
      cw_up = doubled;
      ++d.doublings;
      continue;
    }
    if (single) {
      d.ok = true;
      d.cw_down = *single;
      d.n_txop_down = 1;
      d.cw_up = cw_up;
      return d;
    }
    d.ok = false;
    d.cw_up = in.cw_up;
    d.warning = "no valid (CW, N_TXOP) pair within the station window cap";
    return d;
  }
}

namespace {

TuneResult apply_step(int cw_down, int n_txop_down, int cw_up, int cw_up_cap, int n_txop_thresh, int floor,
                      int next_cw, TuneAction step_action) {
  TuneResult r{cw_down, n_txop_down, cw_up, step_action};
  floor = std::max(1, floor);
  if (next_cw >= floor) {
    r.cw_down = std::min(next_cw, kMaxApWindow);
    return r;
  }
  if (double_window(cw_up) <= cw_up_cap) {
    r.cw_up = double_window(cw_up);
    r.cw_down = std::min(std::max(double_window(cw_down), floor), kMaxApWindow);
    r.action = TuneAction::DoubledBoth;
  } else if (2 * n_txop_down <= n_txop_thresh) {
    r.n_txop_down = 2 * n_txop_down;
    r.cw_down = std::min(std::max(double_window(cw_down), floor), kMaxApWindow);
    r.action = TuneAction::DoubledDownAndTxop;
  } else {
    r.cw_down = floor;
    r.action = TuneAction::ClampedToFloor;
  }
  return r;
}

}  // namespace

TuneResult tune_params(const TuneInput& in) {
  TuneResult none{in.cw_down, in.n_txop_down, in.cw_up, TuneAction::None};
  if (!in.u_measured) return none;
  const double err = *in.u_measured - in.u_target;
  const double mag = std::abs(err);
  if (mag <= in.alpha * in.u_target) return none;
  const bool high = mag > in.gamma * in.u_target;
  const int step = high ? in.chi_high : in.chi_low;
  const TuneAction action = high ? TuneAction::StepHigh : TuneAction::StepLow;
  const int next = err > 0 ? in.cw_down - step : in.cw_down + step;
  return apply_step(in.cw_down, in.n_txop_down, in.cw_up, in.cw_up_cap, in.n_txop_thresh, in.ap_cw_floor, next,
                    action);
}

TuneResult epda_tune(const EpdaInput& in) {
  if (in.avg_queue == in.q_thresh) return TuneResult{in.cw_down, in.n_txop_down, in.cw_up, TuneAction::None};
  const int next = in.avg_queue > in.q_thresh ? in.cw_down - in.chi_low : in.cw_down + in.chi_low;
  return apply_step(in.cw_down, in.n_txop_down, in.cw_up, in.cw_up_cap, in.n_txop_thresh, in.ap_cw_floor, next,
                    TuneAction::StepLow);
}

double fra_drop_probability(double arrival_rate, double c_fair) {
  if (!(arrival_rate > 0.0) || !(c_fair > 0.0)) throw ContractViolation("FRA needs positive A and C_f");
  return std::max(0.0, (arrival_rate - c_fair) / arrival_rate);
}

std::string_view to_string(TuneAction a) {
  switch (a) {
    case TuneAction::None: return "none";
    case TuneAction::StepHigh: return "step-high";
    case TuneAction::StepLow: return "step-low";
    case TuneAction::DoubledBoth: return "doubled-both";
    case TuneAction::DoubledDownAndTxop: return "doubled-ap-and-txop";
    case TuneAction::ClampedToFloor: return "clamped";
  }
  return "?";
}

}  // namespace edcafair::control

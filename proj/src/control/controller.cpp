#include "edcafair/control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edcafair/errors.hpp"

namespace edcafair::control {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Default: return "default";
    case Scheme::Wfa: return "wfa";
    case Scheme::Epda: return "epda";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "default") return Scheme::Default;
  if (name == "wfa") return Scheme::Wfa;
  if (name == "epda") return Scheme::Epda;
  throw ConfigError("unknown controller scheme '" + std::string(name) + "'");
}

std::string_view to_string(AdaptPath p) {
  switch (p) {
    case AdaptPath::Idle: return "idle";
    case AdaptPath::Decision: return "decision";
    case AdaptPath::Tuning: return "tuning";
    case AdaptPath::Epda: return "epda";
  }
  return "?";
}

void ControllerConfig::validate() const {
  if (beta < 1) throw ConfigError("controller: beta must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("controller: alpha must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("controller: gamma must lie in [0, 1]");
  if (chi_high <= 0 || chi_low <= 0) throw ConfigError("controller: chi_high and chi_low must be > 0");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("controller: delta must lie in [0, 1]");
  if (theta < 1) throw ConfigError("controller: theta must be >= 1");
  if (n_txop_thresh < 1) throw ConfigError("controller: n_txop_thresh must be >= 1");
  if (!(u_target > 0.0)) throw ConfigError("controller: u_target must be > 0");
  if (!(q_thresh >= 0.0)) throw ConfigError("controller: q_thresh must be >= 0");
  if (!(saturation_band >= 0.0 && saturation_band < 1.0)) {
    throw ConfigError("controller: saturation_band must lie in [0, 1)");
  }
}

namespace {

int ladder_ratio(const mac::EdcaParams& def) { return std::max(1, (def.cw_max + 1) / (def.cw_min + 1)); }

}  // namespace

FairController::FairController(ControllerConfig cfg, const mac::AcParamSet& ap_initial,
                               const mac::AcParamSet& sta_initial, std::array<AcTraffic, mac::kNumAcs> traffic)
    : cfg_(std::move(cfg)), ap_defaults_(ap_initial), sta_defaults_(sta_initial), traffic_(traffic) {
  cfg_.validate();
  state_.ap_params = ap_initial;
  state_.sta_params = sta_initial;
  for (int ac = 0; ac < mac::kNumAcs; ++ac) {
    const auto& p = ap_initial[ac];
    const SimTime t = traffic_[ac].t_exc;
    state_.n_txop_down[ac] = (t > 0 && p.txop_limit > 0) ? static_cast<int>(std::max<SimTime>(1, p.txop_limit / t)) : 1;
  }
}

StationRecord& FairController::record(int ac, int station, Direction dir) {
  auto& table = table_.at(ac);
  auto [it, inserted] = table.try_emplace(Key{station, dir});
  if (inserted) {
    it->second.station_id = station;
    it->second.direction = dir;
    it->second.ac = ac;
  }
  it->second.seen = true;
  return it->second;
}

void FairController::note_downlink_arrival(const mac::Frame& f) {
  if (f.kind == FrameKind::Data) {
    ++record(f.ac, f.station_id, Direction::Downlink).arrivals;
  } else {
    record(f.ac, f.station_id, Direction::Uplink);
  }
}

void FairController::note_delivery(bool from_ap, const mac::Frame& f) {
  const Direction data_dir = from_ap ? Direction::Downlink : Direction::Uplink;
  if (f.kind == FrameKind::Data) {
    ++record(f.ac, f.station_id, data_dir).successes;
  } else {
    // A transport ACK travels against its data direction.
    record(f.ac, f.station_id, from_ap ? Direction::Uplink : Direction::Downlink);
  }
}

double FairController::fra_probability(int ac, int station) const {
  const auto& m = fra_.at(ac);
  const auto it = m.find(station);
  return it == m.end() ? 0.0 : it->second;
}

bool FairController::fra_admit(const mac::Frame& f, sim::RandomSource& rng) const {
  if (f.kind != FrameKind::Data || f.direction != Direction::Downlink) return true;
  const double p = fra_probability(f.ac, f.station_id);
  if (p <= 0.0) return true;
  return !rng.bernoulli(p);
}

const std::vector<StationRecord>& FairController::stations(int ac) const { return snapshot_.at(ac); }

bool FairController::close_interval(int ac) {
  bool changed = false;
  auto& table = table_[ac];
  auto& snap = snapshot_[ac];
  snap.clear();
  for (auto it = table.begin(); it != table.end();) {
    StationRecord& r = it->second;
    if (!r.seen) {
      it = table.erase(it);
      changed = true;
      continue;
    }
    const auto arr = static_cast<double>(r.arrivals);
    const auto succ = static_cast<double>(r.successes);
    if (!r.initialized) {
      r.ema_arrivals = arr;
      r.ema_successes = succ;
      r.initialized = true;
      changed = true;
    } else {
      r.ema_arrivals = ema_update(r.ema_arrivals, arr, cfg_.delta);
      r.ema_successes = ema_update(r.ema_successes, succ, cfg_.delta);
    }
    r.active = true;
    snap.push_back(r);
    r.arrivals = 0;
    r.successes = 0;
    r.seen = false;
    ++it;
  }
  active_ac_[ac] = !snap.empty();
  return changed;
}

int FairController::ap_floor(int ac) const {
  int floor = 1;
  for (int j = ac + 1; j < mac::kNumAcs; ++j) {
    if (active_ac_[j]) floor = std::max(floor, state_.ap_params[j].cw_min);
  }
  return floor;
}

int FairController::sta_floor(int ac) const {
  int floor = 1;
  for (int j = ac + 1; j < mac::kNumAcs; ++j) {
    if (active_ac_[j]) floor = std::max(floor, state_.sta_params[j].cw_min);
  }
  return floor;
}

void FairController::set_ap(int ac, int cw_min, int n_txop) {
  auto& p = state_.ap_params[ac];
  p.cw_min = std::max(1, cw_min);
  p.cw_max = std::max(p.cw_min, (p.cw_min + 1) * ladder_ratio(ap_defaults_[ac]) - 1);
  state_.n_txop_down[ac] = std::max(1, n_txop);
  p.txop_limit = traffic_[ac].t_exc * state_.n_txop_down[ac];
}

void FairController::set_sta(int ac, int cw_min) {
  auto& p = state_.sta_params[ac];
  p.cw_min = cw_min;
  p.cw_max = std::min(32767, std::max(cw_min, (cw_min + 1) * ladder_ratio(sta_defaults_[ac]) - 1));
}

void FairController::enforce_priority() {
  for (int ac = mac::kNumAcs - 1; ac >= 0; --ac) {
    if (!cfg_.adapt[ac] || !active_ac_[ac]) continue;
    const int ap_min = ap_floor(ac);
    if (state_.ap_params[ac].cw_min < ap_min) set_ap(ac, ap_min, state_.n_txop_down[ac]);
    const int sta_min = sta_floor(ac);
    if (state_.sta_params[ac].cw_min < sta_min) {
      int cw = state_.sta_params[ac].cw_min;
      while (cw < sta_min) cw = double_window(cw);
      set_sta(ac, cw);
    }
  }
}

void FairController::run_adaptation_interval(SimTime now, const std::array<double, mac::kNumAcs>& avg_ap_queue) {
  ++interval_;
  std::array<bool, mac::kNumAcs> changed{};
  for (int ac = 0; ac < mac::kNumAcs; ++ac) changed[ac] = close_interval(ac);
  for (int ac = mac::kNumAcs - 1; ac >= 0; --ac) {
    if (!active_ac_[ac]) {
      fra_[ac].clear();
      continue;
    }
    adapt_ac(ac, now, avg_ap_queue[ac], changed[ac]);
  }
  if (cfg_.scheme != Scheme::Default) enforce_priority();
}

void FairController::adapt_ac(int ac, SimTime now, double avg_queue, bool population_changed) {
  auto& snap = snapshot_[ac];
  ControllerRecord row;
  row.interval = interval_;
  row.time = now;
  row.ac = ac;
  row.avg_queue = avg_queue;

  std::vector<StationDemand> demands;
  demands.reserve(snap.size());
  double c_total = 0.0;
  for (const auto& r : snap) {
    if (r.direction == Direction::Uplink) {
      ++row.n_up;
      demands.push_back({Direction::Uplink, r.ema_successes});
    } else {
      ++row.n_down;
      demands.push_back({Direction::Downlink, r.ema_arrivals});
    }
    c_total += r.ema_successes;
  }
  row.c_total = c_total;

  std::optional<Classification> cls;
  if (c_total > 0.0) {
    cls = classify_stations(demands, c_total, cfg_.saturation_band);
    row.c_fair = cls->c_fair;
    row.n_sat_up = cls->n_sat_up;
    row.n_sat_down = cls->n_sat_down;
    state_.c_fair[ac] = cls->c_fair;
    std::ostringstream labels;
    double up_sum = 0.0;
    double down_sum = 0.0;
    for (std::size_t i = 0; i < snap.size(); ++i) {
      snap[i].saturated = cls->saturated[i];
      table_[ac][Key{snap[i].station_id, snap[i].direction}].saturated = cls->saturated[i];
      row.label_list.push_back({snap[i].station_id, snap[i].direction, static_cast<bool>(cls->saturated[i])});
      if (i > 0) labels << ' ';
      labels << snap[i].station_id << (snap[i].direction == Direction::Uplink ? 'u' : 'd') << ':'
             << (cls->saturated[i] ? 'S' : 'N');
      if (cls->saturated[i]) {
        if (snap[i].direction == Direction::Uplink) {
          up_sum += static_cast<double>(snap[i].successes);
        } else {
          down_sum += static_cast<double>(snap[i].successes);
        }
      }
    }
    row.labels = labels.str();
    int n_up_m = cls->n_sat_up;
    int n_down_m = cls->n_sat_down;
    if (traffic_[ac].tcp) {
      // ACK clocking hides TCP demand, so the labels cannot pick the bulk
      // flows; take the busiest stations of each direction instead.
      up_sum = down_sum = 0.0;
      n_up_m = n_down_m = 0;
      std::array<double, 2> top{0.0, 0.0};
      for (const auto& r : snap) {
        auto& t = top[r.direction == Direction::Uplink ? 0 : 1];
        t = std::max(t, r.ema_successes);
      }
      for (const auto& r : snap) {
        const bool up = r.direction == Direction::Uplink;
        const double t = top[up ? 0 : 1];
        if (!(t > 0.0) || r.ema_successes < (1.0 - cfg_.saturation_band) * t) continue;
        (up ? up_sum : down_sum) += static_cast<double>(r.successes);
        ++(up ? n_up_m : n_down_m);
      }
    }
    if (n_up_m > 0 && n_down_m > 0) {
      const double up_mean = up_sum / n_up_m;
      const double down_mean = down_sum / n_down_m;
      row.u_measured = down_mean > 0.0 ? up_mean / down_mean : 1e6;
    }
  }

  const bool tcp = traffic_[ac].tcp;
  double e_d = 0.0;
  if (cls) {
    e_d = tcp ? effective_downlink_tcp(row.n_up, row.n_down, traffic_[ac].delack, state_.history[ac])
              : effective_downlink_udp(*cls);
    if (tcp && row.n_down == 0) e_d = 0.0;
  }
  row.e_d = e_d;

  const bool adaptive = cfg_.scheme != Scheme::Default && cfg_.adapt[ac];
  // theta scales the window size, so 31 may grow to 127 for theta = 4.
  const int cap = cfg_.theta * (sta_defaults_[ac].cw_min + 1) - 1;
  if (adaptive && cls) {
    const bool decide = !state_.decided[ac] || population_changed;
    if (decide) {
      row.path = AdaptPath::Decision;
      if (e_d > 0.0) {
        DecisionInput in;
        in.e_d = e_d;
        in.u_target = cfg_.u_target;
        in.cw_up = std::max(sta_defaults_[ac].cw_min, sta_floor(ac));
        in.n_txop_up = 1;
        in.n_txop_thresh = cfg_.n_txop_thresh;
        in.cw_up_cap = cap;
        in.ap_cw_floor = ap_floor(ac);
        const Decision d = decide_params(in);
        if (d.ok) {
          set_sta(ac, d.cw_up);
          const int n = cfg_.scheme == Scheme::Epda ? 2 * d.n_txop_down : d.n_txop_down;
          set_ap(ac, d.cw_down, n);
          state_.decided[ac] = true;
          row.action = "decided";
        } else {
          row.warning = d.warning;
          row.action = "kept";
        }
      } else {
        row.action = "no-downlink";
      }
    } else {
      TuneResult t;
      if (cfg_.scheme == Scheme::Epda) {
        row.path = AdaptPath::Epda;
        EpdaInput in;
        in.avg_queue = avg_queue;
        in.q_thresh = cfg_.q_thresh;
        in.chi_low = cfg_.chi_low;
        in.cw_down = state_.ap_params[ac].cw_min;
        in.n_txop_down = state_.n_txop_down[ac];
        in.cw_up = state_.sta_params[ac].cw_min;
        in.cw_up_cap = cap;
        in.n_txop_thresh = 2 * cfg_.n_txop_thresh;
        in.ap_cw_floor = ap_floor(ac);
        t = epda_tune(in);
      } else {
        row.path = AdaptPath::Tuning;
        TuneInput in;
        in.u_measured = row.u_measured;
        in.u_target = cfg_.u_target;
        in.alpha = cfg_.alpha;
        in.gamma = cfg_.gamma;
        in.chi_high = cfg_.chi_high;
        in.chi_low = cfg_.chi_low;
        in.cw_down = state_.ap_params[ac].cw_min;
        in.n_txop_down = state_.n_txop_down[ac];
        in.cw_up = state_.sta_params[ac].cw_min;
        in.cw_up_cap = cap;
        in.n_txop_thresh = cfg_.n_txop_thresh;
        in.ap_cw_floor = ap_floor(ac);
        t = tune_params(in);
      }
      row.action = std::string(to_string(t.action));
      if (t.cw_up != state_.sta_params[ac].cw_min) set_sta(ac, t.cw_up);
      set_ap(ac, t.cw_down, t.n_txop_down);
    }

    fra_[ac].clear();
    if (cfg_.fra && !tcp && cls->c_fair > 0.0) {
      for (const auto& r : snap) {
        if (r.direction != Direction::Downlink || !r.saturated || !(r.ema_arrivals > 0.0)) continue;
        const double p = fra_drop_probability(r.ema_arrivals, cls->c_fair);
        if (p > 0.0) fra_[ac][r.station_id] = p;
      }
    }

    if (tcp) {
      TcpHistory& h = state_.history[ac];
      h.valid = true;
      h.cw_up = state_.sta_params[ac].cw_min;
      h.cw_down = static_cast<double>(state_.ap_params[ac].cw_min) / state_.n_txop_down[ac];
      h.eta = tcp_eta(row.n_up, row.n_down, traffic_[ac].delack);
    }
  }

  const auto& ap = state_.ap_params[ac];
  const auto& sta = state_.sta_params[ac];
  row.ap_cw_min = ap.cw_min;
  row.ap_cw_max = ap.cw_max;
  row.n_txop_down = state_.n_txop_down[ac];
  row.ap_txop = ap.txop_limit;
  row.sta_cw_min = sta.cw_min;
  row.sta_cw_max = sta.cw_max;
  records_.push_back(std::move(row));
}

}  // namespace edcafair::control

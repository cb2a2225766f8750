#include "edcafair/scenario/builtin.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "edcafair/errors.hpp"

namespace edcafair::scenario {

namespace {

using traffic::AgentKind;
using traffic::FlowSpec;
using traffic::Transport;

class Params {
 public:
  Params(std::string name, std::map<std::string, std::string> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  int get_int(const std::string& key, int fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int v = 0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(key, s);
    return v;
  }

  double get_double(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) bad(key, s);
    return v;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  void check_all_used() const {
    for (const auto& [k, v] : values_) {
      if (!used_.contains(k)) throw ConfigError(name_ + ": unknown parameter '" + k + "'");
    }
  }

 private:
  [[noreturn]] void bad(const std::string& key, const std::string& v) const {
    throw ConfigError(name_ + ": bad value '" + v + "' for '" + key + "'");
  }

  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

/// Incrementally assembles stations and flows.
class Builder {
 public:
  explicit Builder(ScenarioConfig& cfg) : cfg_(cfg) {}

  int station() {
    const int id = next_station_++;
    cfg_.stations.push_back(StationSpec{id, std::nullopt});
    return id;
  }

  FlowSpec& flow(int station, Direction dir, Transport tr, AgentKind agent) {
    FlowSpec f;
    f.flow_id = next_flow_++;
    f.station_id = station;
    f.direction = dir;
    f.transport = tr;
    f.agent = agent;
    f.start = 0;
    f.stop = cfg_.duration;
    f.ac = tr == Transport::Udp ? 1 : 0;
    cfg_.flows.push_back(f);
    return cfg_.flows.back();
  }

 private:
  ScenarioConfig& cfg_;
  int next_station_ = 1;
  int next_flow_ = 1;
};

Transport transport_param(Params& p, const std::string& fallback) {
  const std::string t = p.get_string("transport", fallback);
  if (t == "udp") return Transport::Udp;
  if (t == "tcp") return Transport::Tcp;
  throw ConfigError("transport must be udp or tcp");
}

/// Saturating UDP rate for the PHY in use.
double saturating_rate(const ScenarioConfig& c) { return c.phy.data_rate >= 20e6 ? 10e6 : 5e6; }

/// Above the whole channel's capacity, so the queue never drains.
double overload_rate(const ScenarioConfig& c) { return 2.0 * c.phy.data_rate; }

/// Low rates spread uniformly over 150-550 kb/s.
double low_rate(int i, int count) {
  if (count <= 1) return 350e3;
  return 150e3 + 400e3 * static_cast<double>(i) / static_cast<double>(count - 1);
}

SimTime stagger(int i) { return static_cast<SimTime>(i) * 10 * kMicrosPerMilli; }

/// n uplink and n downlink stations, half saturated and half low rate.
void mixed_population(ScenarioConfig& c, Builder& b, int n, Transport tr, int dack) {
  if (n < 1) throw ConfigError("n must be >= 1");
  const int sat = (n + 1) / 2;
  const int low = n - sat;
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n; ++i) {
      const int st = b.station();
      const bool saturated = i < sat;
      FlowSpec* f = nullptr;
      if (tr == Transport::Udp) {
        f = &b.flow(st, dir, tr, AgentKind::Poisson);
        f->rate_bps = saturated ? saturating_rate(c) : low_rate(i - sat, low);
      } else {
        f = &b.flow(st, dir, tr, saturated ? AgentKind::Ftp : AgentKind::Telnet);
        if (!saturated) f->rate_bps = low_rate(i - sat, low);
        f->delack = dack;
      }
      f->start = stagger(k++);
    }
  }
}

void scenario_1(ScenarioConfig& c, Params& p, int default_n, int default_dack) {
  Builder b(c);
  const Transport tr = transport_param(p, "udp");
  const int n = p.get_int("n", default_n);
  const int dack = p.get_int("dack", default_dack);
  mixed_population(c, b, n, tr, dack);
  c.ap_buffer = p.get_int("buffer", c.ap_buffer);
}

void scenario_2(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const Transport tr = transport_param(p, "udp");
  const int dack = p.get_int("dack", 1);
  const SimTime life = 15 * kMicrosPerSecond;
  const SimTime first = 10 * kMicrosPerSecond;
  c.duration = std::max(c.duration, first + 4 * life + 5 * kMicrosPerSecond);

  auto add = [&](Direction dir, bool saturated, double low_bps, SimTime start, SimTime stop) {
    const int st = b.station();
    FlowSpec* f = nullptr;
    if (tr == Transport::Udp) {
      f = &b.flow(st, dir, tr, AgentKind::Poisson);
      f->rate_bps = saturated ? 2.0 * saturating_rate(c) * (start > 0 ? 1.0 : 0.5) : low_bps;
    } else if (saturated) {
      f = &b.flow(st, dir, tr, AgentKind::Ftp);
      if (start > 0) f->total_packets = 6000;
      f->delack = dack;
    } else {
      f = &b.flow(st, dir, tr, AgentKind::Telnet);
      f->rate_bps = low_bps;
      f->delack = dack;
    }
    f->start = start;
    f->stop = stop;
  };

  add(Direction::Uplink, true, 0, 0, c.duration);
  add(Direction::Uplink, false, 0.5e6, stagger(1), c.duration);
  add(Direction::Downlink, true, 0, stagger(2), c.duration);
  add(Direction::Downlink, false, 0.5e6, stagger(3), c.duration);
  const bool up_sat[4] = {true, false, true, false};
  const bool down_sat[4] = {true, false, false, true};
  for (int k = 0; k < 4; ++k) {
    const SimTime start = first + k * life;
    const SimTime stop = start + (tr == Transport::Udp ? life : 2 * life);
    const SimTime udp_stop = start + life;
    add(Direction::Uplink, up_sat[k], 1e6, start, up_sat[k] ? stop : udp_stop);
    add(Direction::Downlink, down_sat[k], 1e6, start, down_sat[k] ? stop : udp_stop);
  }
}

void scenario_4(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int n = p.get_int("n", 15);
  const int shorts = p.get_int("short", 10);
  const int total = p.get_int("packets", 30);
  const int dack = p.get_int("dack", 1);
  if (shorts < 0 || shorts > n) throw ConfigError("short must lie in [0, n]");
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n - shorts; ++i) {
      auto& f = b.flow(b.station(), dir, Transport::Tcp, AgentKind::Ftp);
      f.delack = dack;
      f.start = stagger(k++);
    }
  }
  // Short transfers begin at spread-out times after the bulk flows settle.
  const SimTime first = 5 * kMicrosPerSecond;
  const SimTime spacing = 2 * kMicrosPerSecond;
  for (int i = 0; i < shorts; ++i) {
    for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
      auto& f = b.flow(b.station(), dir, Transport::Tcp, AgentKind::Short);
      f.total_packets = total;
      f.delack = dack;
      f.start = first + i * spacing + (dir == Direction::Downlink ? spacing / 2 : 0);
      if (f.start >= c.duration) throw ConfigError("duration too short for the short-flow schedule");
    }
  }
}

void scenario_5(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int n = p.get_int("n", 5);
  const int rt = p.get_int("rt", 5);
  const double rt_rate = p.get_double("rt_rate", 250e3);
  const int rt_size = p.get_int("rt_size", 1500);
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < rt; ++i) {
      auto& f = b.flow(b.station(), dir, Transport::Udp, AgentKind::Poisson);
      f.rate_bps = rt_rate;
      f.packet_size = rt_size;
      f.ac = 3;
      f.start = stagger(k++);
    }
  }
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n; ++i) {
      auto& f = b.flow(b.station(), dir, Transport::Udp, AgentKind::Poisson);
      f.rate_bps = saturating_rate(c);
      f.start = stagger(k++);
    }
  }
}

void scenario_6(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const Transport tr = transport_param(p, "udp");
  const int n = p.get_int("n", 6);
  const int dack = p.get_int("dack", 1);
  if (n < 3) throw ConfigError("n must be >= 3");
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n; ++i) {
      const int st = b.station();
      const int per_station = 1 + (3 * i) / n;
      for (int j = 0; j < per_station; ++j) {
        auto& f = b.flow(st, dir, tr, tr == Transport::Udp ? AgentKind::Poisson : AgentKind::Ftp);
        if (tr == Transport::Udp) f.rate_bps = saturating_rate(c);
        f.delack = dack;
        f.start = stagger(k++);
      }
    }
  }
}

void scenario_7(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int n = p.get_int("n", 12);
  const int dack = p.get_int("dack", 2);
  const double delay_ms = p.get_double("delay", 0.0);
  static constexpr int kWindows[] = {12, 20, 42, 84};
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n; ++i) {
      auto& f = b.flow(b.station(), dir, Transport::Tcp, AgentKind::Ftp);
      f.adv_window = kWindows[i % 4];
      f.delack = dack;
      f.wired_delay = static_cast<SimTime>(std::llround(delay_ms * 1e3));
      f.start = stagger(k++);
    }
  }
}

void mac_share(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int n = p.get_int("n", 5);
  if (n < 1) throw ConfigError("n must be >= 1");
  int k = 0;
  for (int i = 0; i < n; ++i) {
    auto& f = b.flow(b.station(), Direction::Uplink, Transport::Udp, AgentKind::Poisson);
    f.rate_bps = 3.0 * saturating_rate(c);
    f.start = stagger(k++);
  }
  auto& f = b.flow(b.station(), Direction::Downlink, Transport::Udp, AgentKind::Poisson);
  f.rate_bps = 3.0 * saturating_rate(c);
  f.start = stagger(k++);
}

void access_ratio(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int cwd = p.get_int("cwd", 31);
  const int ntxop = p.get_int("ntxop", 1);
  const int cwu = p.get_int("cwu", 31);
  if (cwd < 1 || ntxop < 1) throw ConfigError("cwd and ntxop must be >= 1");
  auto& up = b.flow(b.station(), Direction::Uplink, Transport::Udp, AgentKind::Poisson);
  up.rate_bps = overload_rate(c);
  auto& down = b.flow(b.station(), Direction::Downlink, Transport::Udp, AgentKind::Poisson);
  down.rate_bps = overload_rate(c);
  down.start = stagger(1);
  const int ratio = 16;
  c.ap_edca[1].cw_min = cwd;
  c.ap_edca[1].cw_max = (cwd + 1) * ratio - 1;
  c.ap_edca[1].txop_limit = ntxop > 1 ? ntxop * mac::compute_t_exc(c.phy, 1500) : 0;
  c.sta_edca[1].cw_min = cwu;
  c.sta_edca[1].cw_max = std::min(32767, (cwu + 1) * ratio - 1);
}

void fra_pair(ScenarioConfig& c, Params& p) {
  Builder b(c);
  auto& sat = b.flow(b.station(), Direction::Downlink, Transport::Udp, AgentKind::Poisson);
  sat.rate_bps = p.get_double("high", 10e6);
  auto& low = b.flow(b.station(), Direction::Downlink, Transport::Udp, AgentKind::Poisson);
  low.rate_bps = p.get_double("low", 0.5e6);
  low.start = stagger(1);
}

void tcp_pairs(ScenarioConfig& c, Params& p) {
  Builder b(c);
  const int n = p.get_int("n", 4);
  const int dack = p.get_int("dack", 2);
  int k = 0;
  for (Direction dir : {Direction::Uplink, Direction::Downlink}) {
    for (int i = 0; i < n; ++i) {
      auto& f = b.flow(b.station(), dir, Transport::Tcp, AgentKind::Ftp);
      f.delack = dack;
      f.start = stagger(k++);
    }
  }
}

struct Entry {
  BuiltinInfo info;
  std::string default_scheme;
  double default_duration_s;
  std::string default_phy;
  std::function<void(ScenarioConfig&, Params&)> build;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> kEntries = {
      {{"scenario-1", "12 uplink + 12 downlink stations, half saturated, half 150-550 kb/s",
        {"n", "transport", "dack", "buffer"}},
       "default", 30.0, "g", [](ScenarioConfig& c, Params& p) { scenario_1(c, p, 12, 1); }},
      {{"scenario-2", "time-varying population; stations join for 15 s each", {"transport", "dack"}},
       "wfa", 75.0, "g", scenario_2},
      {{"scenario-3", "scaling point: n per direction, half saturated, optional PER",
        {"n", "transport", "dack", "buffer"}},
       "wfa", 30.0, "g", [](ScenarioConfig& c, Params& p) { scenario_1(c, p, 6, 2); }},
      {{"scenario-4", "short 30-packet TCP transfers over bulk TCP", {"n", "short", "packets", "dack"}},
       "wfa", 40.0, "g", scenario_4},
      {{"scenario-5", "5+5 realtime 250 kb/s flows on AC3 with n saturated best-effort pairs",
        {"n", "rt", "rt_rate", "rt_size"}},
       "wfa", 30.0, "b", scenario_5},
      {{"scenario-6", "1, 2 or 3 saturated flows per station", {"n", "transport", "dack"}},
       "wfa", 30.0, "g", scenario_6},
      {{"scenario-7", "FTP flows with advertised windows 12/20/42/84 and a wired delay", {"n", "dack", "delay"}},
       "wfa", 30.0, "g", scenario_7},
      {{"scenario-8", "scenario-3 with a 20-packet AP buffer", {"n", "transport", "dack", "buffer"}},
       "wfa", 30.0, "g",
       [](ScenarioConfig& c, Params& p) {
         c.ap_buffer = 20;
         scenario_1(c, p, 6, 2);
       }},
      {{"mac-share", "n saturated uplink UDP stations and one saturated downlink flow", {"n"}},
       "default", 30.0, "g", mac_share},
      {{"access-ratio", "one saturated station per direction under static AP parameters", {"cwd", "ntxop", "cwu"}},
       "default", 30.0, "g", access_ratio},
      {{"fra-pair", "one saturated and one light downlink UDP flow on 802.11b", {"high", "low"}}, "wfa", 30.0, "b",
       fra_pair},
      {{"tcp-pairs", "n saturated FTP flows per direction", {"n", "dack"}}, "wfa", 30.0, "g", tcp_pairs},
  };
  return kEntries;
}

std::pair<std::string, std::map<std::string, std::string>> split_id(std::string_view id) {
  const auto colon = id.find(':');
  std::string name(id.substr(0, colon));
  std::map<std::string, std::string> values;
  if (colon == std::string_view::npos) return {name, values};
  std::string_view rest = id.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ConfigError(name + ": expected key=value, got '" + std::string(item) + "'");
    }
    values[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return {name, values};
}

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> kCatalog = [] {
    std::vector<BuiltinInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return kCatalog;
}

bool is_builtin_id(std::string_view id) {
  const std::string name(id.substr(0, id.find(':')));
  return std::any_of(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.name == name; });
}

ScenarioConfig expand_builtin(std::string_view id) {
  auto [name, values] = split_id(id);
  const auto it =
      std::find_if(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.name == name; });
  if (it == entries().end()) throw ConfigError("unknown builtin scenario '" + name + "'");
  Params p(name, values);

  ScenarioConfig c;
  c.id = std::string(id);
  const std::string phy = p.get_string("phy", it->default_phy);
  if (phy == "g") {
    c.phy = mac::PhyProfile::ieee80211g();
  } else if (phy == "b") {
    c.phy = mac::PhyProfile::ieee80211b();
  } else {
    throw ConfigError(name + ": phy must be g or b");
  }
  c.phy.per = p.get_double("per", 0.0);
  c.seed = static_cast<std::uint64_t>(p.get_int("seed", 1));
  c.duration = static_cast<SimTime>(std::llround(it->default_duration_s * 1e6));
  const double duration_s = p.get_double("duration", -1.0);
  c.warmup = static_cast<SimTime>(std::llround(p.get_double("warmup", 10.0) * 1e6));
  const std::string scheme = p.get_string("scheme", it->default_scheme);
  it->build(c, p);
  c.controller.q_thresh = p.get_double("q_thresh", 0.05 * c.ap_buffer);
  p.check_all_used();
  if (duration_s >= 0.0) set_duration(c, static_cast<SimTime>(std::llround(duration_s * 1e6)));
  if (name == "access-ratio") {
    c.scheme = "static";
  } else {
    apply_scheme(c, scheme);
  }
  c.validate();
  return c;
}

}  // namespace edcafair::scenario

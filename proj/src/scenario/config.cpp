#include "edcafair/scenario/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "edcafair/errors.hpp"
#include "edcafair/scenario/builtin.hpp"

namespace edcafair::scenario {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_seconds(SimTime us) { return fmt_double(static_cast<double>(us) / 1e6); }
std::string fmt_millis(SimTime us) { return fmt_double(static_cast<double>(us) / 1e3); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + msg);
  }

 private:
  int line_;
};

double to_double(std::string_view v, const LineError& at) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    at.fail("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t to_int(std::string_view v, const LineError& at) {
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    at.fail("expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

int to_int32(std::string_view v, const LineError& at) {
  const std::int64_t x = to_int(v, at);
  if (x < -2147483647 || x > 2147483647) at.fail("integer out of range");
  return static_cast<int>(x);
}

bool to_bool(std::string_view v, const LineError& at) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  at.fail("expected true or false, got '" + std::string(v) + "'");
}

SimTime seconds_value(std::string_view v, const LineError& at) {
  return static_cast<SimTime>(std::llround(to_double(v, at) * 1e6));
}

SimTime millis_value(std::string_view v, const LineError& at) {
  return static_cast<SimTime>(std::llround(to_double(v, at) * 1e3));
}

std::vector<std::string_view> split_fields(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && (v[i] == ' ' || v[i] == '\t' || v[i] == ',')) ++i;
    const std::size_t start = i;
    while (i < v.size() && v[i] != ' ' && v[i] != '\t' && v[i] != ',') ++i;
    if (i > start) out.push_back(v.substr(start, i - start));
  }
  return out;
}

mac::EdcaParams edca_value(std::string_view v, const LineError& at) {
  const auto f = split_fields(v);
  if (f.size() != 4) at.fail("expected 'aifsn cw_min cw_max txop_us'");
  mac::EdcaParams p;
  p.aifsn = to_int32(f[0], at);
  p.cw_min = to_int32(f[1], at);
  p.cw_max = to_int32(f[2], at);
  p.txop_limit = to_int(f[3], at);
  return p;
}

int ac_key(std::string_view key, const LineError& at) {
  if (key.size() == 3 && key.substr(0, 2) == "ac" && key[2] >= '0' && key[2] <= '3') return key[2] - '0';
  at.fail("unknown key '" + std::string(key) + "' (expected ac0-ac3)");
}

Direction direction_value(std::string_view v, const LineError& at) {
  if (v == "uplink" || v == "up") return Direction::Uplink;
  if (v == "downlink" || v == "down") return Direction::Downlink;
  at.fail("direction must be uplink or downlink");
}

traffic::Transport transport_value(std::string_view v, const LineError& at) {
  if (v == "udp") return traffic::Transport::Udp;
  if (v == "tcp") return traffic::Transport::Tcp;
  at.fail("transport must be udp or tcp");
}

traffic::AgentKind agent_value(std::string_view v, const LineError& at) {
  if (v == "poisson") return traffic::AgentKind::Poisson;
  if (v == "ftp") return traffic::AgentKind::Ftp;
  if (v == "telnet") return traffic::AgentKind::Telnet;
  if (v == "short") return traffic::AgentKind::Short;
  at.fail("agent must be poisson, ftp, telnet or short");
}

struct PendingFlow {
  traffic::FlowSpec spec;
  int line = 0;
  bool has_id = false;
  bool has_station = false;
  bool has_direction = false;
  bool has_transport = false;
  bool has_agent = false;
  bool has_stop = false;
};

struct PendingStation {
  StationSpec spec;
  int line = 0;
  bool has_id = false;
};

}  // namespace

double parse_rate(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty rate");
  double mult = 1.0;
  switch (text.back()) {
    case 'k': case 'K': mult = 1e3; break;
    case 'M': case 'm': mult = 1e6; break;
    case 'G': case 'g': mult = 1e9; break;
    default: break;
  }
  if (mult != 1.0) text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("bad rate '" + std::string(text) + "'");
  }
  return v * mult;
}

const traffic::FlowSpec* ScenarioConfig::flow(int flow_id) const {
  for (const auto& f : flows) {
    if (f.flow_id == flow_id) return &f;
  }
  return nullptr;
}

void ScenarioConfig::validate() const {
  if (duration < 0) throw ConfigError("run: duration must be >= 0");
  if (beacon_interval <= 0) throw ConfigError("run: beacon interval must be positive");
  if (warmup < 0) throw ConfigError("run: warmup must be >= 0");
  if (retry_limit < 1) throw ConfigError("run: retry limit must be >= 1");
  if (ap_buffer < 1 || sta_buffer < 1) throw ConfigError("run: buffers must hold at least one frame");
  phy.validate();
  for (int ac = 0; ac < mac::kNumAcs; ++ac) {
    const std::string where = "ac" + std::to_string(ac);
    try {
      ap_edca[ac].validate();
      sta_edca[ac].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("edca " + where + ": " + e.what());
    }
    const auto& s = sta_edca[ac];
    if (!mac::is_exponent_form(s.cw_min) || !mac::is_exponent_form(s.cw_max)) {
      throw ConfigError("edca.sta " + where + ": station windows must be of the form 2^k - 1 (got " +
                        std::to_string(s.cw_min) + "/" + std::to_string(s.cw_max) + ")");
    }
    if (s.txop_limit % mac::kTxopUnit != 0 || s.txop_limit / mac::kTxopUnit > 65535) {
      throw ConfigError("edca.sta " + where + ": station TXOP must be a multiple of 32 us up to 65535 units");
    }
  }
  controller.validate();
  std::set<int> station_ids;
  for (const auto& s : stations) {
    if (s.id < 1) throw ConfigError("station ids must be >= 1");
    if (!station_ids.insert(s.id).second) throw ConfigError("duplicate station id " + std::to_string(s.id));
    if (s.buffer && *s.buffer < 1) throw ConfigError("station " + std::to_string(s.id) + ": buffer must be >= 1");
  }
  std::set<int> flow_ids;
  for (const auto& f : flows) {
    f.validate();
    if (!flow_ids.insert(f.flow_id).second) throw ConfigError("duplicate flow id " + std::to_string(f.flow_id));
    if (!station_ids.contains(f.station_id)) {
      throw ConfigError("flow " + std::to_string(f.flow_id) + ": undeclared station " + std::to_string(f.station_id));
    }
  }
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::vector<PendingStation> stations;
  std::vector<PendingFlow> flows;
  std::string section;
  bool header = false;
  bool saw_duration = false;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const LineError at(line_no);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!header) {
      const auto f = split_fields(line);
      if (f.size() != 2 || f[0] != "edcafair-scenario") at.fail("expected header 'edcafair-scenario <version>'");
      const int version = to_int32(f[1], at);
      if (version != kFormatVersion) at.fail("unsupported format version " + std::to_string(version));
      header = true;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {"run",        "phy",     "edca.ap", "edca.sta",
                                                  "controller", "station", "flow"};
      if (!known.contains(section)) at.fail("unknown section [" + section + "]");
      if (section == "station") stations.push_back(PendingStation{{}, line_no, false});
      if (section == "flow") {
        PendingFlow pf;
        pf.line = line_no;
        flows.push_back(pf);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) at.fail("expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) at.fail("missing key");
    if (value.empty()) at.fail("missing value for '" + std::string(key) + "'");
    if (section.empty()) at.fail("key '" + std::string(key) + "' outside of any section");
    auto unknown = [&]() { at.fail("unknown key '" + std::string(key) + "' in [" + section + "]"); };

    if (section == "run") {
      if (key == "id") {
        cfg.id = std::string(value);
      } else if (key == "duration") {
        cfg.duration = seconds_value(value, at);
        saw_duration = true;
      } else if (key == "seed") {
        const std::int64_t s = to_int(value, at);
        if (s < 0) at.fail("seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(s);
      } else if (key == "beacon_interval_ms") {
        cfg.beacon_interval = millis_value(value, at);
      } else if (key == "warmup") {
        cfg.warmup = seconds_value(value, at);
      } else if (key == "retry_limit") {
        cfg.retry_limit = to_int32(value, at);
      } else if (key == "ap_buffer") {
        cfg.ap_buffer = to_int32(value, at);
      } else if (key == "sta_buffer") {
        cfg.sta_buffer = to_int32(value, at);
      } else if (key == "preset") {
        cfg.scheme = std::string(value);
      } else {
        unknown();
      }
    } else if (section == "phy") {
      auto& p = cfg.phy;
      if (key == "profile") {
        const double per = p.per;
        if (value == "802.11g") {
          p = mac::PhyProfile::ieee80211g();
        } else if (value == "802.11b") {
          p = mac::PhyProfile::ieee80211b();
        } else {
          at.fail("profile must be 802.11g or 802.11b");
        }
        p.per = per;
      } else if (key == "data_rate") {
        p.data_rate = parse_rate(value);
      } else if (key == "basic_rate") {
        p.basic_rate = parse_rate(value);
      } else if (key == "slot_us") {
        p.slot_time = to_int(value, at);
      } else if (key == "sifs_us") {
        p.sifs = to_int(value, at);
      } else if (key == "overhead_us") {
        p.phy_overhead = to_int(value, at);
      } else if (key == "ack_us") {
        p.ack_duration = to_int(value, at);
      } else if (key == "per") {
        p.per = to_double(value, at);
      } else {
        unknown();
      }
    } else if (section == "edca.ap" || section == "edca.sta") {
      auto& set = section == "edca.ap" ? cfg.ap_edca : cfg.sta_edca;
      set[ac_key(key, at)] = edca_value(value, at);
    } else if (section == "controller") {
      auto& c = cfg.controller;
      if (key == "scheme") {
        try {
          c.scheme = control::parse_scheme(value);
        } catch (const ConfigError& e) {
          at.fail(e.what());
        }
      } else if (key == "beta") {
        c.beta = to_int32(value, at);
      } else if (key == "alpha") {
        c.alpha = to_double(value, at);
      } else if (key == "gamma") {
        c.gamma = to_double(value, at);
      } else if (key == "chi_high") {
        c.chi_high = to_int32(value, at);
      } else if (key == "chi_low") {
        c.chi_low = to_int32(value, at);
      } else if (key == "delta") {
        c.delta = to_double(value, at);
      } else if (key == "theta") {
        c.theta = to_int32(value, at);
      } else if (key == "n_txop_thresh") {
        c.n_txop_thresh = to_int32(value, at);
      } else if (key == "u_target") {
        c.u_target = to_double(value, at);
      } else if (key == "q_thresh") {
        c.q_thresh = to_double(value, at);
      } else if (key == "saturation_band") {
        c.saturation_band = to_double(value, at);
      } else if (key == "fra") {
        c.fra = to_bool(value, at);
      } else if (key == "adapt") {
        c.adapt.fill(false);
        for (auto f : split_fields(value)) {
          const int ac = to_int32(f, at);
          if (ac < 0 || ac > 3) at.fail("adapt lists access categories 0-3");
          c.adapt[ac] = true;
        }
      } else {
        unknown();
      }
    } else if (section == "station") {
      auto& s = stations.back();
      if (key == "id") {
        s.spec.id = to_int32(value, at);
        s.has_id = true;
      } else if (key == "buffer") {
        s.spec.buffer = to_int32(value, at);
      } else {
        unknown();
      }
    } else if (section == "flow") {
      auto& pf = flows.back();
      auto& f = pf.spec;
      if (key == "id") {
        f.flow_id = to_int32(value, at);
        pf.has_id = true;
      } else if (key == "station") {
        f.station_id = to_int32(value, at);
        pf.has_station = true;
      } else if (key == "direction") {
        f.direction = direction_value(value, at);
        pf.has_direction = true;
      } else if (key == "transport") {
        f.transport = transport_value(value, at);
        pf.has_transport = true;
      } else if (key == "agent") {
        f.agent = agent_value(value, at);
        pf.has_agent = true;
      } else if (key == "rate") {
        try {
          f.rate_bps = parse_rate(value);
        } catch (const ConfigError& e) {
          at.fail(e.what());
        }
      } else if (key == "total") {
        f.total_packets = to_int(value, at);
      } else if (key == "start") {
        f.start = seconds_value(value, at);
      } else if (key == "stop") {
        f.stop = seconds_value(value, at);
        pf.has_stop = true;
      } else if (key == "size") {
        f.packet_size = to_int32(value, at);
      } else if (key == "ac") {
        f.ac = to_int32(value, at);
      } else if (key == "wired_delay_ms") {
        f.wired_delay = millis_value(value, at);
      } else if (key == "adv_window") {
        f.adv_window = to_int32(value, at);
      } else if (key == "delack") {
        f.delack = to_int32(value, at);
      } else {
        unknown();
      }
    }
  }
  if (!header) throw ConfigError("line 1: missing header 'edcafair-scenario <version>'");
  (void)saw_duration;

  for (const auto& s : stations) {
    if (!s.has_id) throw ConfigError("line " + std::to_string(s.line) + ": [station] requires id");
    cfg.stations.push_back(s.spec);
  }
  for (auto& pf : flows) {
    const std::string where = "line " + std::to_string(pf.line) + ": [flow] ";
    if (!pf.has_id) throw ConfigError(where + "requires id");
    if (!pf.has_station) throw ConfigError(where + "requires station");
    if (!pf.has_direction) throw ConfigError(where + "requires direction");
    if (!pf.has_transport) throw ConfigError(where + "requires transport");
    if (!pf.has_agent) {
      pf.spec.agent = pf.spec.transport == traffic::Transport::Udp ? traffic::AgentKind::Poisson
                                                                   : traffic::AgentKind::Ftp;
    }
    if (!pf.has_stop) pf.spec.stop = cfg.duration;
    try {
      pf.spec.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    cfg.flows.push_back(pf.spec);
  }
  cfg.validate();
  return cfg;
}

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "edcafair-scenario " << kFormatVersion << "\n\n";
  o << "[run]\n";
  o << "id = " << c.id << "\n";
  o << "preset = " << c.scheme << "\n";
  o << "duration = " << fmt_seconds(c.duration) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "beacon_interval_ms = " << fmt_millis(c.beacon_interval) << "\n";
  o << "warmup = " << fmt_seconds(c.warmup) << "\n";
  o << "retry_limit = " << c.retry_limit << "\n";
  o << "ap_buffer = " << c.ap_buffer << "\n";
  o << "sta_buffer = " << c.sta_buffer << "\n\n";

  o << "[phy]\n";
  o << "profile = " << c.phy.name << "\n";
  o << "data_rate = " << fmt_double(c.phy.data_rate) << "\n";
  o << "basic_rate = " << fmt_double(c.phy.basic_rate) << "\n";
  o << "slot_us = " << c.phy.slot_time << "\n";
  o << "sifs_us = " << c.phy.sifs << "\n";
  o << "overhead_us = " << c.phy.phy_overhead << "\n";
  o << "ack_us = " << c.phy.ack_duration << "\n";
  o << "per = " << fmt_double(c.phy.per) << "\n\n";

  auto edca = [&](const char* name, const mac::AcParamSet& set) {
    o << "[" << name << "]\n";
    for (int ac = 0; ac < mac::kNumAcs; ++ac) {
      const auto& p = set[ac];
      o << "ac" << ac << " = " << p.aifsn << " " << p.cw_min << " " << p.cw_max << " " << p.txop_limit << "\n";
    }
    o << "\n";
  };
  edca("edca.ap", c.ap_edca);
  edca("edca.sta", c.sta_edca);

  const auto& k = c.controller;
  o << "[controller]\n";
  o << "scheme = " << control::to_string(k.scheme) << "\n";
  o << "beta = " << k.beta << "\n";
  o << "alpha = " << fmt_double(k.alpha) << "\n";
  o << "gamma = " << fmt_double(k.gamma) << "\n";
  o << "chi_high = " << k.chi_high << "\n";
  o << "chi_low = " << k.chi_low << "\n";
  o << "delta = " << fmt_double(k.delta) << "\n";
  o << "theta = " << k.theta << "\n";
  o << "n_txop_thresh = " << k.n_txop_thresh << "\n";
  o << "u_target = " << fmt_double(k.u_target) << "\n";
  o << "q_thresh = " << fmt_double(k.q_thresh) << "\n";
  o << "saturation_band = " << fmt_double(k.saturation_band) << "\n";
  o << "fra = " << (k.fra ? "true" : "false") << "\n";
  o << "adapt =";
  for (int ac = 0; ac < mac::kNumAcs; ++ac) {
    if (k.adapt[ac]) o << " " << ac;
  }
  o << "\n";

  for (const auto& s : c.stations) {
    o << "\n[station]\nid = " << s.id << "\n";
    if (s.buffer) o << "buffer = " << *s.buffer << "\n";
  }
  for (const auto& f : c.flows) {
    o << "\n[flow]\n";
    o << "id = " << f.flow_id << "\n";
    o << "station = " << f.station_id << "\n";
    o << "direction = " << to_string(f.direction) << "\n";
    o << "transport = " << traffic::to_string(f.transport) << "\n";
    o << "agent = " << traffic::to_string(f.agent) << "\n";
    if (f.rate_bps > 0) o << "rate = " << fmt_double(f.rate_bps) << "\n";
    if (f.total_packets > 0) o << "total = " << f.total_packets << "\n";
    o << "start = " << fmt_seconds(f.start) << "\n";
    o << "stop = " << fmt_seconds(f.stop) << "\n";
    o << "size = " << f.packet_size << "\n";
    o << "ac = " << f.ac << "\n";
    o << "wired_delay_ms = " << fmt_millis(f.wired_delay) << "\n";
    o << "adv_window = " << f.adv_window << "\n";
    o << "delack = " << f.delack << "\n";
  }
  return o.str();
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = serialize(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

ScenarioConfig load_scenario(const std::string& file_or_builtin) {
  if (is_builtin_id(file_or_builtin)) return expand_builtin(file_or_builtin);
  std::ifstream in(file_or_builtin);
  if (!in) throw ConfigError("cannot open scenario file '" + file_or_builtin + "' (and it is not a builtin id)");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file_or_builtin + ": " + e.what());
  }
}

void set_duration(ScenarioConfig& c, SimTime duration) {
  if (duration < 0) throw ConfigError("duration must be >= 0");
  std::vector<traffic::FlowSpec> kept;
  for (auto f : c.flows) {
    if (f.start >= duration) continue;
    if (f.stop == c.duration || f.stop > duration) f.stop = duration;
    kept.push_back(f);
  }
  c.flows = std::move(kept);
  c.duration = duration;
}

namespace {

int round_up_exponent_form(int v) {
  int cw = 1;
  while (cw < v) cw = 2 * (cw + 1) - 1;
  return cw;
}

std::map<int, int> downlink_counts(const ScenarioConfig& c) {
  std::map<int, std::set<int>> stations;
  for (const auto& f : c.flows) {
    if (f.direction == Direction::Downlink) stations[f.ac].insert(f.station_id);
  }
  std::map<int, int> out;
  for (const auto& [ac, s] : stations) out[ac] = static_cast<int>(s.size());
  return out;
}

}  // namespace

void apply_scheme(ScenarioConfig& c, std::string_view scheme) {
  const auto defaults = mac::default_ac_params();
  c.ap_edca = defaults;
  c.sta_edca = defaults;
  c.controller.scheme = control::Scheme::Default;
  c.scheme = std::string(scheme);
  if (scheme == "default") return;
  if (scheme == "wfa" || scheme == "epda") {
    c.controller.scheme = control::parse_scheme(scheme);
    return;
  }
  const auto counts = downlink_counts(c);
  const mac::PhyProfile& phy = c.phy;
  if (scheme == "txop-diff") {
    for (const auto& [ac, n] : counts) {
      if (ac >= 2) continue;
      int size = 1500;
      for (const auto& f : c.flows) {
        if (f.ac == ac && f.direction == Direction::Downlink) size = f.packet_size;
      }
      c.ap_edca[ac].txop_limit = n * mac::compute_t_exc(phy, size);
    }
    return;
  }
  if (scheme == "cw-diff") {
    for (const auto& [ac, n] : counts) {
      if (ac >= 2) continue;
      const int ratio = (defaults[ac].cw_max + 1) / (defaults[ac].cw_min + 1);
      c.ap_edca[ac].cw_min = 7;
      c.ap_edca[ac].cw_max = 8 * ratio - 1;
      const int sta = round_up_exponent_form(7 * n);
      c.sta_edca[ac].cw_min = sta;
      c.sta_edca[ac].cw_max = std::min(32767, (sta + 1) * ratio - 1);
    }
    return;
  }
  throw ConfigError("unknown scheme '" + std::string(scheme) + "' (default, wfa, epda, txop-diff, cw-diff)");
}

}  // namespace edcafair::scenario

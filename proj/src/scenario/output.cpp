#include "edcafair/scenario/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "edcafair/errors.hpp"

namespace edcafair::scenario {

using nlohmann::ordered_json;

namespace {

double seconds(SimTime us) { return static_cast<double>(us) / 1e6; }

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json params_json(const mac::AcParamSet& set) {
  ordered_json out = ordered_json::array();
  for (int ac = 0; ac < mac::kNumAcs; ++ac) {
    const auto& p = set[ac];
    out.push_back({{"ac", ac}, {"aifsn", p.aifsn}, {"cw_min", p.cw_min}, {"cw_max", p.cw_max},
                   {"txop_us", p.txop_limit}});
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Emit parse_emit(std::string_view name) {
  if (name == "metrics") return Emit::Metrics;
  if (name == "trace") return Emit::Trace;
  if (name == "all") return Emit::All;
  throw ConfigError("unknown --emit value '" + std::string(name) + "' (metrics|trace|all)");
}

std::string report_json(const RunReport& rep) {
  ordered_json j;
  j["tool"] = "edcafair";
  j["version"] = rep.version;
  j["scenario"] = rep.scenario_id;
  j["scheme"] = rep.scheme;
  j["seed"] = rep.seed;
  j["config_hash"] = rep.config_hash;
  j["duration_s"] = seconds(rep.duration);
  j["warmup_s"] = seconds(rep.warmup);

  ordered_json acs = ordered_json::array();
  for (const auto& a : rep.acs) {
    const auto keys = [](const std::vector<metrics::StationKey>& v) {
      ordered_json out = ordered_json::array();
      for (const auto& [sta, dir] : v) out.push_back(std::to_string(sta) + (dir == Direction::Uplink ? "u" : "d"));
      return out;
    };
    acs.push_back({{"ac", a.ac},
                   {"jain_f", opt_json(a.fairness.jain_f)},
                   {"mean_plr_nonsat", opt_json(a.fairness.mean_plr_nonsat)},
                   {"n_saturated", a.fairness.n_saturated},
                   {"n_stations", a.fairness.stations.size()},
                   {"fair_share_bps", opt_json(a.fair_share_bps)},
                   {"saturated", keys(a.saturated)},
                   {"controller_saturated", keys(a.controller_saturated)}});
  }
  j["fairness"] = acs;

  double up = 0.0;
  double down = 0.0;
  ordered_json flows = ordered_json::array();
  for (const auto& f : rep.flows) {
    (f.spec.direction == Direction::Uplink ? up : down) += f.throughput_bps;
    ordered_json fj{{"flow_id", f.spec.flow_id},
                    {"station_id", f.spec.station_id},
                    {"direction", to_string(f.spec.direction)},
                    {"transport", to_string(f.spec.transport)},
                    {"agent", to_string(f.spec.agent)},
                    {"ac", f.spec.ac},
                    {"throughput_bps", f.throughput_bps},
                    {"mean_delay_ms", f.delay.mean_delay_us ? ordered_json(*f.delay.mean_delay_us / 1e3) : nullptr},
                    {"jitter_ms", f.delay.jitter_us ? ordered_json(*f.delay.jitter_us / 1e3) : nullptr}};
    if (f.spec.agent == traffic::AgentKind::Short || f.spec.total_packets > 0) {
      fj["completion_s"] = f.completion ? ordered_json(seconds(*f.completion)) : nullptr;
      fj["censored"] = f.censored;
    }
    flows.push_back(std::move(fj));
  }
  j["throughput"] = {{"uplink_bps", up}, {"downlink_bps", down}, {"total_bps", up + down}};
  j["flows"] = flows;

  std::size_t decisions = 0;
  std::size_t warnings = 0;
  for (const auto& r : rep.controller) {
    if (r.path == control::AdaptPath::Decision) ++decisions;
    if (!r.warning.empty()) ++warnings;
  }
  j["controller"] = {{"rows", rep.controller.size()},
                     {"decisions", decisions},
                     {"warnings", warnings},
                     {"final_ap_params", params_json(rep.final_ap_params)},
                     {"final_sta_params", params_json(rep.final_sta_params)}};
  j["mac"] = {{"transmissions", rep.mac.transmissions},
              {"collisions", rep.mac.collisions},
              {"frame_errors", rep.mac.frame_errors},
              {"delivered", rep.mac.delivered},
              {"busy_s", seconds(rep.mac.busy_time)}};
  return j.dump(2) + "\n";
}

std::string throughput_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "time_s,station_id,bits_per_s,direction\n";
  for (const auto& s : rep.throughput) {
    const double span = seconds(s.window_end - s.window_start);
    const double bps = span > 0 ? static_cast<double>(s.delivered_bits) / span : 0.0;
    out << format_double(seconds(s.window_start)) << ',' << s.station_id << ',' << format_double(bps) << ','
        << to_string(s.direction) << '\n';
  }
  return out.str();
}

std::string controller_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "interval,time_s,ac,path,n_up,n_down,n_sat_up,n_sat_down,c_total,c_fair,e_d,u_measured,avg_queue,"
         "ap_cw_min,ap_cw_max,n_txop_down,ap_txop_us,sta_cw_min,sta_cw_max,action,warning,labels\n";
  for (const auto& r : rep.controller) {
    out << r.interval << ',' << format_double(seconds(r.time)) << ',' << r.ac << ',' << to_string(r.path) << ','
        << r.n_up << ',' << r.n_down << ',' << r.n_sat_up << ',' << r.n_sat_down << ',' << format_double(r.c_total)
        << ',' << format_double(r.c_fair) << ',' << format_double(r.e_d) << ',' << opt(r.u_measured) << ','
        << format_double(r.avg_queue) << ',' << r.ap_cw_min << ',' << r.ap_cw_max << ',' << r.n_txop_down << ','
        << r.ap_txop << ',' << r.sta_cw_min << ',' << r.sta_cw_max << ',' << r.action << ',' << r.warning << ','
        << r.labels << '\n';
  }
  return out.str();
}

std::string flows_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "flow_id,station_id,direction,transport,agent,ac,generated,received,throughput_bps,mean_delay_ms,"
         "jitter_ms,completion_s,censored,transmissions,acks_sent,timeouts,fast_retransmits\n";
  for (const auto& f : rep.flows) {
    const auto ms = [](const std::optional<double>& us) { return us ? format_double(*us / 1e3) : std::string(); };
    out << f.spec.flow_id << ',' << f.spec.station_id << ',' << to_string(f.spec.direction) << ','
        << to_string(f.spec.transport) << ',' << to_string(f.spec.agent) << ',' << f.spec.ac << ','
        << f.counters.generated << ',' << f.counters.received << ',' << format_double(f.throughput_bps) << ','
        << ms(f.delay.mean_delay_us) << ',' << ms(f.delay.jitter_us) << ','
        << (f.completion ? format_double(seconds(*f.completion)) : std::string()) << ',' << (f.censored ? 1 : 0)
        << ',' << f.counters.transmissions << ',' << f.counters.acks_sent << ',' << f.counters.timeouts << ','
        << f.counters.fast_retransmits << '\n';
  }
  return out.str();
}

std::string stations_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "ac,station_id,direction,saturated,arrivals,drops,retry_drops,plr,delivered_frames,throughput_bps\n";
  const SimTime span = rep.duration - rep.warmup;
  for (const auto& a : rep.acs) {
    for (const auto& s : a.fairness.stations) {
      const auto plr = metrics::packet_loss_rate(s.arrivals, s.drops);
      out << a.ac << ',' << s.station_id << ',' << to_string(s.direction) << ',' << (s.saturated ? 1 : 0) << ','
          << s.arrivals << ',' << s.drops << ',' << s.retry_drops << ',' << opt(plr) << ',' << s.delivered_frames << ','
          << format_double(span > 0 ? s.throughput_bps(span) : 0.0) << '\n';
    }
  }
  return out.str();
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream out;
  out << "time_us,event,flow_id,station_id,host,ac,direction,kind,bytes,enqueue_time_us,reason\n";
  for (const auto& r : trace.records()) {
    out << r.time << ',' << to_string(r.event) << ',' << r.flow_id << ',' << r.station << ',' << r.host << ','
        << static_cast<int>(r.ac) << ',' << to_string(r.direction) << ',' << to_string(r.kind) << ',' << r.bytes
        << ',' << r.enqueue_time << ',' << to_string(r.reason) << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_outputs(const RunReport& rep, const std::filesystem::path& dir, Emit emit) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto put = [&](const char* name, const std::string& content) {
    const auto path = dir / name;
    write_file(path, content);
    written.push_back(path);
  };
  put("report.json", report_json(rep));
  if (emit != Emit::Trace) {
    put("throughput.csv", throughput_csv(rep));
    put("controller.csv", controller_csv(rep));
    put("flows.csv", flows_csv(rep));
    put("stations.csv", stations_csv(rep));
  }
  if (emit != Emit::Metrics) {
    if (!rep.trace) throw ContractViolation("trace output requested but the run did not keep its trace");
    put("trace.csv", trace_csv(*rep.trace));
  }
  return written;
}

}  // namespace edcafair::scenario

#include "edcafair/scenario/runner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "edcafair/errors.hpp"

namespace edcafair::scenario {

namespace {

using traffic::Flow;
using traffic::FlowSpec;

std::array<control::AcTraffic, mac::kNumAcs> ac_traffic(const ScenarioConfig& cfg) {
  std::array<control::AcTraffic, mac::kNumAcs> out{};
  std::array<int, mac::kNumAcs> size{1500, 1500, 1500, 1500};
  for (const auto& f : cfg.flows) {
    if (f.transport == traffic::Transport::Tcp) {
      out[f.ac].tcp = true;
      out[f.ac].delack = std::max(out[f.ac].delack, f.delack);
    }
    size[f.ac] = f.packet_size;
  }
  for (int ac = 0; ac < mac::kNumAcs; ++ac) out[ac].t_exc = mac::compute_t_exc(cfg.phy, size[ac]);
  return out;
}

/// Wires flows, the wireless cell and the AP controller together.
///
/// Wired hops are pure delays. Data and ACK frames cross the air once; the
/// AP relays between the wired side and its own EDCA queues.
class Network final : public traffic::FlowIo {
 public:
  Network(const ScenarioConfig& cfg, sim::Simulator& sim, Trace& trace)
      : cfg_(cfg),
        sim_(sim),
        trace_(trace),
        channel_(sim, cfg.phy, cfg.retry_limit, &trace),
        controller_(cfg.controller, cfg.ap_edca, cfg.sta_edca, ac_traffic(cfg)) {
    channel_.add_host(static_cast<std::size_t>(cfg.ap_buffer), cfg.ap_edca);
    for (const auto& s : cfg.stations) {
      const int host = channel_.add_host(static_cast<std::size_t>(s.buffer.value_or(cfg.sta_buffer)), cfg.sta_edca);
      host_of_[s.id] = host;
    }
    channel_.on_delivered([this](int host, const mac::Frame& f) { on_delivered(host, f); });
    for (const auto& spec : cfg.flows) {
      auto flow = traffic::make_flow(spec, sim, *this, &trace, traffic::TcpTimers{});
      flow->install();
      flows_[spec.flow_id] = std::move(flow);
    }
    if (cfg.beacon_interval <= cfg.duration) {
      sim_.schedule(cfg.beacon_interval, [this] { beacon(); });
    }
  }

  void from_sender(const FlowSpec& flow, mac::Frame frame) override {
    frame.uid = ++uid_;
    if (flow.direction == Direction::Uplink) {
      channel_.enqueue(host_of_.at(flow.station_id), frame);
    } else {
      sim_.schedule_in(flow.wired_delay, [this, frame] { arrive_at_ap(frame); });
    }
  }

  void from_receiver(const FlowSpec& flow, mac::Frame frame) override {
    frame.uid = ++uid_;
    if (flow.direction == Direction::Uplink) {
      sim_.schedule_in(flow.wired_delay, [this, frame] { arrive_at_ap(frame); });
    } else {
      channel_.enqueue(host_of_.at(flow.station_id), frame);
    }
  }

  const mac::WirelessChannel& channel() const { return channel_; }
  const control::FairController& controller() const { return controller_; }
  const std::map<int, std::unique_ptr<Flow>>& flows() const { return flows_; }

 private:
  void arrive_at_ap(const mac::Frame& frame) {
    controller_.note_downlink_arrival(frame);
    if (frame.kind == FrameKind::Data && !controller_.fra_admit(frame, sim_.rng())) {
      TraceRecord r;
      r.time = sim_.now();
      r.flow_id = frame.flow_id;
      r.station = frame.station_id;
      r.host = mac::kApHost;
      r.bytes = frame.bytes;
      r.ac = static_cast<std::uint8_t>(frame.ac);
      r.event = TraceEvent::Dropped;
      r.reason = DropReason::FraFilter;
      r.direction = frame.direction;
      r.kind = frame.kind;
      trace_.add(r);
      return;
    }
    channel_.enqueue(mac::kApHost, frame);
  }

  void on_delivered(int host, const mac::Frame& f) {
    controller_.note_delivery(host == mac::kApHost, f);
    const auto it = flows_.find(f.flow_id);
    if (it == flows_.end()) return;
    Flow* flow = it->second.get();
    const SimTime delay = host == mac::kApHost ? 0 : flow->spec().wired_delay;
    const mac::Frame copy = f;
    sim_.schedule_in(delay, [flow, copy] {
      if (copy.kind == FrameKind::Data) {
        flow->deliver_to_receiver(copy);
      } else {
        flow->deliver_to_sender(copy);
      }
    });
  }

  void beacon() {
    ++beacons_;
    if (beacons_ % cfg_.controller.beta == 0) {
      std::array<double, mac::kNumAcs> avg_queue{};
      for (int ac = 0; ac < mac::kNumAcs; ++ac) {
        auto& q = channel_.queue(mac::kApHost, ac);
        avg_queue[ac] = q.mean_length(sim_.now());
        q.reset_length_stats(sim_.now());
      }
      controller_.run_adaptation_interval(sim_.now(), avg_queue);
      for (int ac = 0; ac < mac::kNumAcs; ++ac) {
        const auto& p = controller_.ap_params()[ac];
        if (!(channel_.params(mac::kApHost, ac) == p)) channel_.set_params(mac::kApHost, ac, p);
      }
    }
    broadcast();
    const SimTime next = sim_.now() + cfg_.beacon_interval;
    if (next <= cfg_.duration) sim_.schedule(next, [this] { beacon(); });
  }

  /// Stations adopt whatever the beacon's EDCA Parameter Set carries.
  void broadcast() {
    const mac::AcParamSet announced = mac::decode_beacon(mac::encode_beacon(controller_.sta_params()));
    for (std::size_t host = 1; host < channel_.host_count(); ++host) {
      for (int ac = 0; ac < mac::kNumAcs; ++ac) {
        if (!(channel_.params(static_cast<int>(host), ac) == announced[ac])) {
          channel_.set_params(static_cast<int>(host), ac, announced[ac]);
        }
      }
    }
  }

  const ScenarioConfig& cfg_;
  sim::Simulator& sim_;
  Trace& trace_;
  mac::WirelessChannel channel_;
  control::FairController controller_;
  std::map<int, int> host_of_;
  std::map<int, std::unique_ptr<Flow>> flows_;
  std::uint64_t uid_ = 0;
  std::uint64_t beacons_ = 0;
};

/// Stations the controller labelled saturated in most adaptation intervals
/// at or after `from`. A single interval's labels are too noisy to define
/// the set on their own.
std::vector<metrics::StationKey> settled_saturated(const std::vector<control::ControllerRecord>& records, int ac,
                                                   SimTime from) {
  std::map<metrics::StationKey, std::pair<int, int>> votes;  // saturated, seen
  for (const auto& r : records) {
    if (r.ac != ac || r.time < from) continue;
    for (const auto& l : r.label_list) {
      auto& v = votes[{l.station, l.direction}];
      if (l.saturated) ++v.first;
      ++v.second;
    }
  }
  std::vector<metrics::StationKey> out;
  for (const auto& [key, v] : votes) {
    if (2 * v.first > v.second) out.push_back(key);
  }
  return out;
}

/// Mean post-warm-up C_f for `ac`, in bits per second of a full-size packet.
std::optional<double> mean_fair_share_bps(const ScenarioConfig& cfg, const std::vector<control::ControllerRecord>& records,
                                          int ac, SimTime from) {
  int size = 0;
  for (const auto& f : cfg.flows) {
    if (f.ac == ac) size = std::max(size, f.packet_size);
  }
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.ac != ac || r.time < from || r.n_up + r.n_down == 0) continue;
    sum += r.c_fair;
    ++n;
  }
  if (n == 0 || size == 0) return std::nullopt;
  const double interval_s =
      static_cast<double>(cfg.beacon_interval) * cfg.controller.beta / static_cast<double>(kMicrosPerSecond);
  return sum / n * size * 8.0 / interval_s;
}

/// Stations whose configured demand reaches the fair share, within the
/// controller's saturation band. Bulk TCP transfers count as unbounded
/// demand; finite transfers never do.
std::vector<metrics::StationKey> declared_saturated(const ScenarioConfig& cfg, int ac, double fair_bps) {
  std::map<metrics::StationKey, double> offered;
  for (const auto& f : cfg.flows) {
    if (f.ac != ac) continue;
    double& o = offered[{f.station_id, f.direction}];
    if (f.agent == traffic::AgentKind::Ftp && f.total_packets == 0) {
      o = std::numeric_limits<double>::infinity();
    } else if (f.agent == traffic::AgentKind::Poisson || f.agent == traffic::AgentKind::Telnet) {
      o += f.rate_bps;
    }
  }
  std::vector<metrics::StationKey> out;
  for (const auto& [key, rate] : offered) {
    if (rate >= (1.0 - cfg.controller.saturation_band) * fair_bps) out.push_back(key);
  }
  return out;
}

}  // namespace

const FlowResult* RunReport::flow(int flow_id) const {
  for (const auto& f : flows) {
    if (f.spec.flow_id == flow_id) return &f;
  }
  return nullptr;
}

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  auto trace = std::make_shared<Trace>();
  sim::Simulator sim(config.seed);
  RunReport rep;
  rep.scenario_id = config.id;
  rep.scheme = config.scheme;
  rep.seed = config.seed;
  rep.config_hash = config_hash(config);
  rep.duration = config.duration;
  rep.warmup = std::min(config.warmup, config.duration);

  try {
    Network net(config, sim, *trace);
    sim.run_until(config.duration);

    rep.mac = net.channel().stats();
    rep.controller = net.controller().records();
    rep.final_ap_params = net.controller().ap_params();
    rep.final_sta_params = net.controller().sta_params();

    const SimTime span = config.duration - rep.warmup;
    std::map<int, std::uint64_t> bits;
    std::map<int, std::vector<double>> delays;
    for (const auto& r : trace->records()) {
      if (r.event != TraceEvent::Delivered || r.kind != FrameKind::Data || r.time < rep.warmup) continue;
      bits[r.flow_id] += static_cast<std::uint64_t>(r.bytes) * 8;
      if (r.enqueue_time >= 0) delays[r.flow_id].push_back(static_cast<double>(r.time - r.enqueue_time));
    }
    for (const auto& [id, flow] : net.flows()) {
      FlowResult fr;
      fr.spec = flow->spec();
      fr.counters = flow->counters();
      fr.delivered_bits = bits[id];
      fr.throughput_bps = span > 0 ? static_cast<double>(fr.delivered_bits) * 1e6 / static_cast<double>(span) : 0.0;
      fr.delay = metrics::delay_jitter(delays[id]);
      if (fr.counters.completed_at) fr.completion = *fr.counters.completed_at - fr.spec.start;
      fr.censored = fr.spec.agent == traffic::AgentKind::Short && !fr.completion;
      rep.flows.push_back(std::move(fr));
    }

    std::array<bool, mac::kNumAcs> used{};
    for (const auto& f : config.flows) used[f.ac] = true;
    for (int ac = 0; ac < mac::kNumAcs; ++ac) {
      if (!used[ac]) continue;
      AcReport a;
      a.ac = ac;
      a.controller_saturated = settled_saturated(rep.controller, ac, rep.warmup);
      a.fair_share_bps = mean_fair_share_bps(config, rep.controller, ac, rep.warmup);
      a.saturated = a.fair_share_bps ? declared_saturated(config, ac, *a.fair_share_bps) : a.controller_saturated;
      a.fairness = metrics::fairness_report(*trace, ac, rep.warmup, config.duration + 1, a.saturated);
      rep.acs.push_back(std::move(a));
    }
    if (config.duration > 0) {
      rep.throughput = metrics::throughput_series(*trace, options.throughput_window, config.duration);
    }
  } catch (const ContractViolation& e) {
    throw ContractViolation("scenario '" + config.id + "' (seed " + std::to_string(config.seed) + "): " + e.what());
  }
  if (options.keep_trace) rep.trace = std::move(trace);
  return rep;
}

}  // namespace edcafair::scenario

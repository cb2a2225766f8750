#include "edcafair/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "edcafair/errors.hpp"

namespace edcafair::metrics {

double jain_index(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("jain index of an empty list");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : x) {
    if (v < 0.0) throw ContractViolation("jain index needs nonnegative values");
    sum += v;
    sq += v * v;
  }
  if (!(sq > 0.0)) throw ContractViolation("jain index of an all-zero list");
  return sum * sum / (static_cast<double>(x.size()) * sq);
}

std::optional<double> packet_loss_rate(std::uint64_t arrivals, std::uint64_t drops) {
  if (arrivals == 0) return std::nullopt;
  return static_cast<double>(drops) / static_cast<double>(arrivals);
}

DelayJitter delay_jitter(std::span<const double> delays_us) {
  DelayJitter out;
  out.samples = delays_us.size();
  if (delays_us.empty()) return out;
  out.mean_delay_us = std::accumulate(delays_us.begin(), delays_us.end(), 0.0) / delays_us.size();
  if (delays_us.size() >= 2) {
    double acc = 0.0;
    for (std::size_t i = 1; i < delays_us.size(); ++i) acc += std::abs(delays_us[i] - delays_us[i - 1]);
    out.jitter_us = acc / static_cast<double>(delays_us.size() - 1);
  }
  return out;
}

DelayJitter flow_delay_jitter(const Trace& trace, int flow_id, SimTime from) {
  std::vector<double> delays;
  for (const auto& r : trace.records()) {
    if (r.flow_id != flow_id || r.event != TraceEvent::Delivered || r.kind != FrameKind::Data) continue;
    if (r.time < from || r.enqueue_time < 0) continue;
    delays.push_back(static_cast<double>(r.time - r.enqueue_time));
  }
  return delay_jitter(delays);
}

std::optional<double> access_ratio(std::span<const double> up_successes, std::span<const double> down_successes) {
  if (up_successes.empty() || down_successes.empty()) return std::nullopt;
  const double up = std::accumulate(up_successes.begin(), up_successes.end(), 0.0) / up_successes.size();
  const double down = std::accumulate(down_successes.begin(), down_successes.end(), 0.0) / down_successes.size();
  if (!(down > 0.0)) return std::nullopt;
  return up / down;
}

std::vector<Completion> completion_times(const Trace& trace, std::span<const int> flow_ids) {
  std::map<int, Completion> by_flow;
  const std::set<int> wanted(flow_ids.begin(), flow_ids.end());
  for (const auto& r : trace.records()) {
    if (r.host != -1 || !wanted.contains(r.flow_id)) continue;
    if (r.event == TraceEvent::FlowStart) {
      Completion& c = by_flow[r.flow_id];
      c.flow_id = r.flow_id;
      c.station_id = r.station;
      c.direction = r.direction;
      c.start = r.time;
    } else if (r.event == TraceEvent::FlowComplete) {
      auto it = by_flow.find(r.flow_id);
      if (it != by_flow.end()) it->second.duration = r.time - it->second.start;
    }
  }
  std::vector<Completion> out;
  for (int id : flow_ids) {
    auto it = by_flow.find(id);
    if (it != by_flow.end()) {
      out.push_back(it->second);
    } else {
      Completion c;
      c.flow_id = id;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<ThroughputSample> throughput_series(const Trace& trace, SimTime window, SimTime end) {
  if (window <= 0) throw ContractViolation("throughput window must be positive");
  const auto windows = static_cast<std::size_t>((end + window - 1) / window);
  std::map<StationKey, std::vector<std::uint64_t>> bits;
  for (const auto& r : trace.records()) {
    if (r.event != TraceEvent::Delivered || r.kind != FrameKind::Data || r.time >= end || r.time < 0) continue;
    auto& v = bits[StationKey{r.station, r.direction}];
    if (v.empty()) v.assign(windows, 0);
    v[static_cast<std::size_t>(r.time / window)] += static_cast<std::uint64_t>(r.bytes) * 8;
  }
  std::vector<ThroughputSample> out;
  out.reserve(bits.size() * windows);
  for (std::size_t w = 0; w < windows; ++w) {
    for (const auto& [key, v] : bits) {
      ThroughputSample s;
      s.station_id = key.first;
      s.direction = key.second;
      s.window_start = static_cast<SimTime>(w) * window;
      s.window_end = std::min(end, s.window_start + window);
      s.delivered_bits = v[w];
      out.push_back(s);
    }
  }
  return out;
}

double StationTotals::throughput_bps(SimTime span) const {
  if (span <= 0) return 0.0;
  return static_cast<double>(delivered_bits) * 1e6 / static_cast<double>(span);
}

std::map<StationKey, StationTotals> station_totals(const Trace& trace, int ac, SimTime from, SimTime to) {
  std::map<StationKey, StationTotals> out;
  auto entry = [&](const TraceRecord& r) -> StationTotals& {
    StationTotals& t = out[StationKey{r.station, r.direction}];
    t.station_id = r.station;
    t.direction = r.direction;
    return t;
  };
  for (const auto& r : trace.records()) {
    if (r.kind != FrameKind::Data || r.host < 0 || r.ac != ac) continue;
    if (r.time < from || r.time >= to) continue;
    switch (r.event) {
      case TraceEvent::Enqueued:
        ++entry(r).arrivals;
        break;
      case TraceEvent::Dropped: {
        StationTotals& t = entry(r);
        if (r.reason != DropReason::RetryLimit) {
          ++t.drops;
          ++t.arrivals;
        } else if (r.host == 0) {
          ++t.drops;
        } else {
          ++t.retry_drops;
        }
        break;
      }
      case TraceEvent::Delivered: {
        StationTotals& t = entry(r);
        ++t.delivered_frames;
        t.delivered_bits += static_cast<std::uint64_t>(r.bytes) * 8;
        break;
      }
      default:
        break;
    }
  }
  return out;
}

FairnessReport fairness_report(const Trace& trace, int ac, SimTime from, SimTime to,
                               const std::vector<StationKey>& saturated) {
  FairnessReport rep;
  auto totals = station_totals(trace, ac, from, to);
  for (const auto& key : saturated) {
    auto& t = totals[key];
    t.station_id = key.first;
    t.direction = key.second;
    t.saturated = true;
  }
  std::vector<double> sat_tp;
  double plr_sum = 0.0;
  int plr_n = 0;
  for (auto& [key, t] : totals) {
    if (t.saturated) {
      sat_tp.push_back(static_cast<double>(t.delivered_bits));
    } else if (auto plr = packet_loss_rate(t.arrivals, t.drops)) {
      plr_sum += *plr;
      ++plr_n;
    }
    rep.stations.push_back(t);
  }
  rep.n_saturated = sat_tp.size();
  if (!sat_tp.empty() && std::any_of(sat_tp.begin(), sat_tp.end(), [](double v) { return v > 0.0; })) {
    rep.jain_f = jain_index(sat_tp);
  }
  if (plr_n > 0) rep.mean_plr_nonsat = plr_sum / plr_n;
  return rep;
}

}  // namespace edcafair::metrics

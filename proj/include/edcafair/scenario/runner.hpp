#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edcafair/control/controller.hpp"
#include "edcafair/mac/channel.hpp"
#include "edcafair/metrics/metrics.hpp"
#include "edcafair/scenario/config.hpp"
#include "edcafair/trace.hpp"
#include "edcafair/traffic/flows.hpp"

namespace edcafair::scenario {

inline constexpr const char* kToolVersion = "0.1.0";

struct FlowResult {
  traffic::FlowSpec spec;
  traffic::FlowCounters counters;
  std::uint64_t delivered_bits = 0;  ///< data delivered over the air after warm-up
  double throughput_bps = 0.0;       ///< delivered_bits over the measured span
  metrics::DelayJitter delay;        ///< over-the-air delay after warm-up
  std::optional<SimTime> completion;
  bool censored = false;  ///< short flow that never finished
};

struct AcReport {
  int ac = 0;
  metrics::FairnessReport fairness;
  /// Stations whose configured demand reaches (1 - band) of the mean fair share C_f.
  std::vector<metrics::StationKey> saturated;
  /// Stations the controller labelled saturated in most intervals.
  std::vector<metrics::StationKey> controller_saturated;
  std::optional<double> fair_share_bps;
};

struct RunReport {
  std::string scenario_id;
  std::string scheme;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version = kToolVersion;
  SimTime duration = 0;
  SimTime warmup = 0;
  std::vector<AcReport> acs;
  std::vector<metrics::ThroughputSample> throughput;
  std::vector<control::ControllerRecord> controller;
  std::vector<FlowResult> flows;
  mac::MacStats mac;
  mac::AcParamSet final_ap_params{};
  mac::AcParamSet final_sta_params{};
  std::shared_ptr<const Trace> trace;

  const FlowResult* flow(int flow_id) const;
};

struct RunOptions {
  SimTime throughput_window = 1 * kMicrosPerSecond;
  bool keep_trace = true;
};

/// Builds the BSS described by `config`, runs it to the end, and collects
/// the metrics. Deterministic for a fixed config (the seed is part of it).
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace edcafair::scenario

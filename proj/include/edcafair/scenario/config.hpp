#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edcafair/control/controller.hpp"
#include "edcafair/mac/edca.hpp"
#include "edcafair/mac/phy.hpp"
#include "edcafair/traffic/flow_spec.hpp"

namespace edcafair::scenario {

inline constexpr int kFormatVersion = 1;

struct StationSpec {
  int id = 1;
  std::optional<int> buffer;  ///< per-AC queue capacity override

  friend bool operator==(const StationSpec&, const StationSpec&) = default;
};

/// Complete declarative description of one simulation run.
struct ScenarioConfig {
  std::string id = "custom";
  SimTime duration = 30 * kMicrosPerSecond;
  std::uint64_t seed = 1;
  SimTime beacon_interval = 100 * kMicrosPerMilli;
  SimTime warmup = 10 * kMicrosPerSecond;
  int retry_limit = 7;
  mac::PhyProfile phy = mac::PhyProfile::ieee80211g();
  mac::AcParamSet ap_edca = mac::default_ac_params();
  mac::AcParamSet sta_edca = mac::default_ac_params();
  int ap_buffer = 100;
  int sta_buffer = 100;
  control::ControllerConfig controller;
  /// Label of the parameter preset in use (default, wfa, epda, txop-diff, cw-diff).
  std::string scheme = "default";
  std::vector<StationSpec> stations;
  std::vector<traffic::FlowSpec> flows;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  const traffic::FlowSpec* flow(int flow_id) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses the line-oriented scenario format. The first meaningful line is
/// the header "edcafair-scenario <version>", followed by [section] blocks
/// of `key = value` lines; `#` starts a comment. [station] and [flow] may
/// repeat. Errors carry the offending line number.
ScenarioConfig parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(serialize(c)) == c.
std::string serialize(const ScenarioConfig& config);

/// Stable 64-bit FNV-1a of the canonical form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Reads a scenario file or expands a builtin id.
ScenarioConfig load_scenario(const std::string& file_or_builtin);

/// Parameter presets: default, wfa, epda (controller driven) and the static
/// txop-diff and cw-diff settings. Throws ConfigError on unknown names.
void apply_scheme(ScenarioConfig& config, std::string_view scheme);

/// Changes the run length. Flows that ran to the old end now run to the new
/// one; flows starting at or after the new end are removed; the rest are
/// clipped.
void set_duration(ScenarioConfig& config, SimTime duration);

/// Rate with optional k/M/G suffix, in bits per second.
double parse_rate(std::string_view text);

}  // namespace edcafair::scenario

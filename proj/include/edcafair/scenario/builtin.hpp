#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edcafair/scenario/config.hpp"

namespace edcafair::scenario {

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> keys;  ///< accepted parameters besides the common ones
};

/// Builtin ids have the form name[:key=value,...], e.g.
/// "scenario-3:n=8,transport=tcp,per=0.001,dack=2". Common keys for every
/// builtin: seed, duration (s), warmup (s), scheme, per, phy (g|b), q_thresh
/// (packets, default 5% of the AP buffer).
bool is_builtin_id(std::string_view id);
ScenarioConfig expand_builtin(std::string_view id);
const std::vector<BuiltinInfo>& builtin_catalog();

}  // namespace edcafair::scenario

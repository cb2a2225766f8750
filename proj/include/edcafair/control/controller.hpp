#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edcafair/control/rules.hpp"
#include "edcafair/mac/ac_queue.hpp"
#include "edcafair/mac/edca.hpp"
#include "edcafair/sim/random.hpp"
#include "edcafair/trace.hpp"

namespace edcafair::control {

enum class Scheme : std::uint8_t { Default, Wfa, Epda };

std::string_view to_string(Scheme s);
/// Throws ConfigError for an unknown name.
Scheme parse_scheme(std::string_view name);

struct ControllerConfig {
  int beta = 10;
  double alpha = 0.05;
  double gamma = 0.25;
  int chi_high = 5;
  int chi_low = 1;
  double delta = 0.25;
  int theta = 4;
  int n_txop_thresh = 8;
  double u_target = 1.0;
  double q_thresh = 5.0;  /// packets; 5% of the default 100-packet AP buffer
  Scheme scheme = Scheme::Default;
  double saturation_band = 0.1;
  /// ACs the controller may re-parameterize; the rest keep their settings.
  std::array<bool, mac::kNumAcs> adapt = {true, true, false, false};
  /// Apply the fair-rate drop filter to saturated downlink UDP.
  bool fra = true;

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

/// Traffic facts the controller needs per AC.
struct AcTraffic {
  bool tcp = false;
  int delack = 1;
  SimTime t_exc = 0;  ///< one full-size data exchange, for TXOP sizing
};

struct StationRecord {
  int station_id = 0;
  Direction direction = Direction::Uplink;
  int ac = 0;
  double ema_arrivals = 0.0;
  double ema_successes = 0.0;
  bool saturated = false;
  bool active = false;

  // Raw counts of the running interval.
  std::uint64_t arrivals = 0;
  std::uint64_t successes = 0;
  bool seen = false;
  bool initialized = false;
};

enum class AdaptPath : std::uint8_t { Idle, Decision, Tuning, Epda };
std::string_view to_string(AdaptPath p);

struct StationLabel {
  int station = 0;
  Direction direction = Direction::Uplink;
  bool saturated = false;
};

/// One controller-trace row: an AC at an adaptation boundary.
struct ControllerRecord {
  int interval = 0;
  SimTime time = 0;
  int ac = 0;
  AdaptPath path = AdaptPath::Idle;
  int n_up = 0;
  int n_down = 0;
  int n_sat_up = 0;
  int n_sat_down = 0;
  double c_total = 0.0;
  double c_fair = 0.0;
  double e_d = 0.0;
  std::optional<double> u_measured;
  double avg_queue = 0.0;
  int ap_cw_min = 0;
  int ap_cw_max = 0;
  int n_txop_down = 1;
  SimTime ap_txop = 0;
  int sta_cw_min = 0;
  int sta_cw_max = 0;
  std::string action;
  std::string labels;  ///< e.g. "3u:S 7d:N"
  std::vector<StationLabel> label_list;
  std::string warning;
};

struct AdaptationState {
  mac::AcParamSet ap_params{};
  mac::AcParamSet sta_params{};
  std::array<int, mac::kNumAcs> n_txop_down{1, 1, 1, 1};
  std::array<TcpHistory, mac::kNumAcs> history{};
  std::array<bool, mac::kNumAcs> decided{};
  std::array<double, mac::kNumAcs> c_fair{};
};

/// AP-resident measurement and adaptation engine.
class FairController {
 public:
  FairController(ControllerConfig cfg, const mac::AcParamSet& ap_initial, const mac::AcParamSet& sta_initial,
                 std::array<AcTraffic, mac::kNumAcs> traffic);

  // Measurement hooks, called by the network as frames move.
  /// A frame arrived at the AP from the wired side, before any filtering.
  void note_downlink_arrival(const mac::Frame& f);
  /// A frame was delivered over the air; `from_ap` tells who sent it.
  void note_delivery(bool from_ap, const mac::Frame& f);

  /// FRA admission for a downlink data frame about to be queued at the AP.
  bool fra_admit(const mac::Frame& f, sim::RandomSource& rng) const;
  double fra_probability(int ac, int station) const;

  /// Runs one adaptation interval. `avg_ap_queue` is the time-weighted AP
  /// queue length per AC over the interval.
  void run_adaptation_interval(SimTime now, const std::array<double, mac::kNumAcs>& avg_ap_queue);

  const ControllerConfig& config() const { return cfg_; }
  const AdaptationState& state() const { return state_; }
  const mac::AcParamSet& ap_params() const { return state_.ap_params; }
  const mac::AcParamSet& sta_params() const { return state_.sta_params; }
  const std::vector<ControllerRecord>& records() const { return records_; }
  const std::vector<StationRecord>& stations(int ac) const;
  int intervals() const { return interval_; }

 private:
  using Key = std::pair<int, Direction>;

  StationRecord& record(int ac, int station, Direction dir);
  /// Returns true when a record appeared or disappeared.
  bool close_interval(int ac);
  void adapt_ac(int ac, SimTime now, double avg_queue, bool population_changed);
  int ap_floor(int ac) const;
  int sta_floor(int ac) const;
  void set_ap(int ac, int cw_min, int n_txop);
  void set_sta(int ac, int cw_min);
  void enforce_priority();

  ControllerConfig cfg_;
  mac::AcParamSet ap_defaults_;
  mac::AcParamSet sta_defaults_;
  std::array<AcTraffic, mac::kNumAcs> traffic_;
  AdaptationState state_;

  std::array<std::map<Key, StationRecord>, mac::kNumAcs> table_;
  std::array<std::vector<StationRecord>, mac::kNumAcs> snapshot_;
  std::array<bool, mac::kNumAcs> active_ac_{};
  std::array<std::map<int, double>, mac::kNumAcs> fra_;
  std::vector<ControllerRecord> records_;
  int interval_ = 0;
};

}  // namespace edcafair::control

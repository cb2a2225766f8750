#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "edcafair/control/controller.hpp"
#include "edcafair/control/rules.hpp"
#include "edcafair/mac/ac_queue.hpp"
#include "edcafair/mac/edca.hpp"
#include "edcafair/metrics/metrics.hpp"
#include "edcafair/scenario/builtin.hpp"
#include "edcafair/scenario/output.hpp"
#include "edcafair/scenario/runner.hpp"
#include "edcafair/sim/random.hpp"

using namespace edcafair;

namespace {

constexpr int kCases = 2000;

int random_ladder(sim::RandomSource& r, int lo_exp, int hi_exp) {
  return (1 << r.uniform_int(lo_exp, hi_exp)) - 1;
}

}  // namespace

TEST_CASE("jain index bounds and invariances") {
  sim::RandomSource r(101);
  for (int i = 0; i < kCases; ++i) {
    const auto n = static_cast<std::size_t>(r.uniform_int(1, 30));
    std::vector<double> x(n);
    for (auto& v : x) v = r.bernoulli(0.2) ? 0.0 : r.uniform01() * 1e7;
    x[0] += 1.0;
    const double f = metrics::jain_index(x);
    CHECK(f <= 1.0 + 1e-12);
    CHECK(f >= 1.0 / static_cast<double>(n) - 1e-12);

    std::vector<double> scaled = x;
    const double k = 1.0 + r.uniform01() * 100.0;
    for (auto& v : scaled) v *= k;
    CHECK(metrics::jain_index(scaled) == doctest::Approx(f).epsilon(1e-9));

    std::vector<double> perm = x;
    std::reverse(perm.begin(), perm.end());
    CHECK(metrics::jain_index(perm) == doctest::Approx(f).epsilon(1e-9));

    std::vector<double> flat(n, x[0]);
    CHECK(metrics::jain_index(flat) == doctest::Approx(1.0));
  }
}

TEST_CASE("ema stays between its inputs") {
  sim::RandomSource r(102);
  for (int i = 0; i < kCases; ++i) {
    const double prev = r.uniform01() * 1000.0;
    const double obs = r.uniform01() * 1000.0;
    const double d = r.uniform01();
    const double x = control::ema_update(prev, obs, d);
    CHECK(x >= std::min(prev, obs) - 1e-9);
    CHECK(x <= std::max(prev, obs) + 1e-9);
    CHECK(control::ema_update(prev, obs, 0.0) == doctest::Approx(prev));
    CHECK(control::ema_update(prev, obs, 1.0) == doctest::Approx(obs));
    CHECK(control::ema_update(obs, obs, d) == doctest::Approx(obs));
  }
}

TEST_CASE("backoff update stays on the ladder within bounds") {
  sim::RandomSource r(103);
  for (int i = 0; i < kCases; ++i) {
    mac::EdcaParams p;
    p.cw_min = random_ladder(r, 1, 8);
    p.cw_max = std::max(p.cw_min, random_ladder(r, 0, 10));
    mac::AcQueue q(1, 10, p);
    int cw = p.cw_min;
    for (int step = 0; step < 20; ++step) {
      const auto outcome = r.bernoulli(0.6) ? mac::TxOutcome::Failure : mac::TxOutcome::Success;
      const int next = mac::next_contention_window(cw, p, outcome);
      CHECK(mac::is_exponent_form(next));
      CHECK(next >= p.cw_min);
      CHECK(next <= p.cw_max);
      if (outcome == mac::TxOutcome::Success) {
        CHECK(next == p.cw_min);
      } else {
        CHECK(next >= cw);
      }
      cw = next;

      q.on_attempt(outcome, 7, r);
      CHECK(q.countdown.backoff >= 0);
      CHECK(q.countdown.backoff <= q.current_cw());
      CHECK(q.current_cw() <= p.cw_max);
    }
  }
}

TEST_CASE("fra drop probability") {
  sim::RandomSource r(104);
  for (int i = 0; i < kCases; ++i) {
    const double a = 1e-3 + r.uniform01() * 1000.0;
    const double c = 1e-3 + r.uniform01() * 1000.0;
    const double p = control::fra_drop_probability(a, c);
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
    CHECK((p == 0.0) == (a <= c));
    CHECK(a * (1.0 - p) == doctest::Approx(std::min(a, c)).epsilon(1e-9));
  }
}

TEST_CASE("classification terminates with consistent labels") {
  sim::RandomSource r(105);
  for (int i = 0; i < kCases; ++i) {
    const auto n = static_cast<std::size_t>(r.uniform_int(1, 40));
    std::vector<control::StationDemand> d(n);
    double total = 0.0;
    for (auto& s : d) {
      s.direction = r.bernoulli(0.5) ? Direction::Uplink : Direction::Downlink;
      s.demand = r.bernoulli(0.1) ? 0.0 : r.uniform01() * 100.0;
      total += s.demand;
    }
    const double c_total = r.bernoulli(0.5) ? total * (0.3 + r.uniform01()) + 1.0 : 1.0 + r.uniform01() * 500.0;
    const auto c = control::classify_stations(d, c_total, 0.1);
    CHECK(c.iterations <= static_cast<int>(n));
    CHECK(c.c_fair > 0.0);
    CHECK(c.saturated.size() == n);
    int sat = 0;
    double nonsat = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (c.saturated[k]) {
        ++sat;
      } else {
        nonsat += d[k].demand;
      }
    }
    CHECK(sat == c.n_sat);
    CHECK(c.n_sat_up + c.n_sat_down == c.n_sat);
    CHECK(nonsat == doctest::Approx(c.c_nonsat));
    if (c.n_sat == 0) CHECK(c.c_fair == doctest::Approx(c_total / static_cast<double>(n)));
    CHECK(control::effective_downlink_udp(c) >= 0.0);
  }
}

TEST_CASE("decisions respect the parameter-set invariants") {
  sim::RandomSource r(106);
  for (int i = 0; i < kCases; ++i) {
    control::DecisionInput in;
    in.e_d = 0.05 + r.uniform01() * 30.0;
    in.u_target = 0.5 + r.uniform01() * 2.0;
    in.cw_up = random_ladder(r, 3, 6);
    in.cw_up_cap = 4 * (31 + 1) - 1;
    in.n_txop_thresh = static_cast<int>(r.uniform_int(1, 16));
    in.ap_cw_floor = r.bernoulli(0.5) ? 1 : static_cast<int>(r.uniform_int(1, 15));
    const auto d = control::decide_params(in);
    if (d.ok) {
      CHECK(mac::is_exponent_form(d.cw_up));
      CHECK(d.cw_up >= in.cw_up);
      CHECK((d.cw_up <= in.cw_up_cap || d.cw_up == in.cw_up));
      CHECK(d.cw_down >= in.ap_cw_floor);
      CHECK(d.n_txop_down >= 1);
      CHECK(d.n_txop_down <= in.n_txop_thresh);
    } else {
      CHECK(d.cw_up == in.cw_up);
    }
  }
}

TEST_CASE("tuning respects the parameter-set invariants") {
  sim::RandomSource r(107);
  for (int i = 0; i < kCases; ++i) {
    control::TuneInput t;
    t.u_measured = r.uniform01() * 4.0;
    t.cw_up = random_ladder(r, 5, 7);
    t.cw_up_cap = 127;
    t.ap_cw_floor = static_cast<int>(r.uniform_int(1, 15));
    t.cw_down = static_cast<int>(r.uniform_int(t.ap_cw_floor, 300));
    t.n_txop_thresh = 8;
    t.n_txop_down = static_cast<int>(r.uniform_int(1, 8));
    const auto a = control::tune_params(t);
    CHECK(a.cw_down >= t.ap_cw_floor);
    CHECK(mac::is_exponent_form(a.cw_up));
    CHECK(a.cw_up <= t.cw_up_cap);
    CHECK(a.n_txop_down <= t.n_txop_thresh);
    CHECK(std::abs(a.cw_down - t.cw_down) <= std::max(t.chi_high, t.cw_down + 1));

    control::EpdaInput e;
    e.avg_queue = r.uniform01() * 100.0;
    e.q_thresh = r.uniform01() * 50.0;
    e.cw_up = t.cw_up;
    e.ap_cw_floor = t.ap_cw_floor;
    e.cw_down = t.cw_down;
    e.n_txop_down = t.n_txop_down;
    e.n_txop_thresh = 16;
    const auto b = control::epda_tune(e);
    CHECK(b.cw_down >= e.ap_cw_floor);
    CHECK(mac::is_exponent_form(b.cw_up));
    CHECK(b.cw_up <= e.cw_up_cap);
    CHECK(b.n_txop_down <= e.n_txop_thresh);
  }
}

TEST_CASE("controller keeps announced parameters encodable") {
  sim::RandomSource r(108);
  for (const auto scheme : {control::Scheme::Wfa, control::Scheme::Epda}) {
    control::ControllerConfig cfg;
    cfg.scheme = scheme;
    std::array<control::AcTraffic, mac::kNumAcs> traffic{};
    for (auto& t : traffic) t.t_exc = 303;
    traffic[0].tcp = true;
    traffic[0].delack = 2;
    cfg.adapt = {true, true, false, false};
    control::FairController c(cfg, mac::default_ac_params(), mac::default_ac_params(), traffic);
    for (int i = 0; i < kCases / 2; ++i) {
      const auto n = r.uniform_int(1, 12);
      for (int s = 1; s <= n; ++s) {
        if (r.bernoulli(0.1)) continue;
        mac::Frame f;
        f.station_id = s;
        f.ac = static_cast<int>(r.uniform_int(0, 1));
        f.direction = s % 2 ? Direction::Uplink : Direction::Downlink;
        const auto k = r.uniform_int(0, 80);
        for (int j = 0; j < k; ++j) {
          if (f.direction == Direction::Downlink) c.note_downlink_arrival(f);
          if (f.direction == Direction::Uplink || r.bernoulli(0.5)) c.note_delivery(f.direction == Direction::Downlink, f);
        }
      }
      std::array<double, mac::kNumAcs> q{};
      for (auto& v : q) v = r.uniform01() * 100.0;
      c.run_adaptation_interval(static_cast<SimTime>(i + 1) * kMicrosPerSecond, q);
      CHECK_NOTHROW(mac::decode_beacon(mac::encode_beacon(c.sta_params())));
      for (int ac = 0; ac < 2; ++ac) {
        CHECK(c.sta_params()[ac].cw_min <= 127);
        CHECK(c.ap_params()[ac].cw_min >= 1);
        CHECK(c.ap_params()[ac].cw_min <= c.ap_params()[ac].cw_max);
        CHECK(c.state().n_txop_down[ac] >= 1);
      }
    }
  }
}

TEST_CASE("beacon encoding round-trips") {
  sim::RandomSource r(109);
  for (int i = 0; i < kCases; ++i) {
    mac::AcParamSet set;
    for (auto& p : set) {
      p.aifsn = static_cast<int>(r.uniform_int(1, 15));
      p.cw_min = random_ladder(r, 0, 10);
      p.cw_max = std::max(p.cw_min, random_ladder(r, 0, 15));
      p.txop_limit = mac::kTxopUnit * r.uniform_int(0, 200);
    }
    CHECK(mac::decode_beacon(mac::encode_beacon(set)) == set);
  }
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("same seed gives byte-identical outputs") {
  const auto root = std::filesystem::temp_directory_path() / "edcafair_determinism";
  std::filesystem::remove_all(root);
  for (const char* id : {"scenario-3:n=4,transport=tcp,dack=2,scheme=epda,duration=5,warmup=1",
                         "scenario-1:scheme=wfa,duration=5,warmup=1", "fra-pair:duration=5,warmup=1,per=0.01"}) {
    CAPTURE(id);
    const auto cfg = scenario::expand_builtin(id);
    const auto a = scenario::write_outputs(scenario::run_scenario(cfg), root / "a", scenario::Emit::All);
    const auto b = scenario::write_outputs(scenario::run_scenario(cfg), root / "b", scenario::Emit::All);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CAPTURE(a[i].filename().string());
      CHECK(slurp(a[i]) == slurp(b[i]));
    }
    std::filesystem::remove_all(root);
  }
}

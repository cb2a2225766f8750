#include <vector>

#include "doctest.h"
#include "edcafair/control/controller.hpp"
#include "edcafair/control/rules.hpp"
#include "edcafair/errors.hpp"

using namespace edcafair;
using namespace edcafair::control;

TEST_CASE("ema") {
  CHECK(ema_update(10, 10, 0.3) == doctest::Approx(10));
  CHECK(ema_update(7, 3, 1.0) == doctest::Approx(3));
  CHECK(ema_update(0, 100, 0.25) == doctest::Approx(25));
  CHECK_THROWS_AS(ema_update(0, 1, 1.5), ContractViolation);
}

TEST_CASE("classification of the hand-traced example") {
  const std::vector<StationDemand> d{
      {Direction::Uplink, 40}, {Direction::Uplink, 5}, {Direction::Downlink, 70}, {Direction::Downlink, 10}};
  const auto c = classify_stations(d, 100, 0.1);
  CHECK(c.saturated == std::vector<bool>{true, false, true, false});
  CHECK(c.c_fair == doctest::Approx(42.5));
  CHECK(c.c_nonsat == doctest::Approx(15));
  CHECK(c.n_sat == 2);
  CHECK(effective_downlink_udp(c) == doctest::Approx(52.5 / 42.5));
}

TEST_CASE("classification edge cases") {
  const std::vector<StationDemand> light{{Direction::Downlink, 5}, {Direction::Downlink, 10}};
  const auto a = classify_stations(light, 100, 0.1);
  CHECK(a.n_sat == 0);
  CHECK(a.degenerate);
  CHECK(a.c_fair == doctest::Approx(50));

  const std::vector<StationDemand> one{{Direction::Downlink, 95}, {Direction::Downlink, 4}, {Direction::Downlink, 6}};
  const auto b = classify_stations(one, 100, 0.1);
  CHECK(b.n_sat == 1);
  CHECK(b.c_fair == doctest::Approx(100 - 10));

  const std::vector<StationDemand> exact{{Direction::Downlink, 90}, {Direction::Downlink, 4}, {Direction::Downlink, 6}};
  const auto e = classify_stations(exact, 100, 0.1);
  CHECK(e.n_sat == 1);
  CHECK(e.c_fair == doctest::Approx(90));

  const std::vector<StationDemand> up_only{{Direction::Uplink, 30}, {Direction::Uplink, 30}};
  CHECK(effective_downlink_udp(classify_stations(up_only, 60, 0.1)) == doctest::Approx(0));

  const std::vector<StationDemand> all_down{
      {Direction::Downlink, 50}, {Direction::Downlink, 50}, {Direction::Downlink, 50}};
  CHECK(effective_downlink_udp(classify_stations(all_down, 90, 0.1)) == doctest::Approx(3));

  CHECK_THROWS_AS(classify_stations(std::vector<StationDemand>{}, 1, 0.1), ContractViolation);
}

TEST_CASE("tcp effective downlink") {
  CHECK(tcp_eta(4, 3, 2) == doctest::Approx(5));
  TcpHistory h{true, 31, 10, 4};
  CHECK(effective_downlink_tcp(4, 3, 2, h) == doctest::Approx(3.875));
  TcpHistory same{true, 31, 10, 5};
  CHECK(effective_downlink_tcp(4, 3, 2, same) == doctest::Approx(3.1));
  CHECK(effective_downlink_tcp(4, 3, 2, TcpHistory{}) == doctest::Approx(5));
}

TEST_CASE("decision") {
  CHECK(candidate_cw_down(31, 1, 4, 1, 2) == 4);
  CHECK(candidate_cw_down(31, 1, 1, 1, 1) == 31);

  DecisionInput in;
  in.e_d = 4;
  const auto d = decide_params(in);
  CHECK(d.ok);
  CHECK(d.n_txop_down == 2);
  CHECK(d.cw_down == 4);
  CHECK(d.cw_up == 31);

  in.ap_cw_floor = 7;
  const auto up = decide_params(in);
  CHECK(up.ok);
  CHECK(up.cw_up == 63);
  CHECK(up.n_txop_down == 2);
  CHECK(up.cw_down == 8);
  CHECK(up.doublings == 1);
}

TEST_CASE("decision needs two doublings at e_d = 10 under a floor of 7") {
  DecisionInput in;
  in.e_d = 10;
  in.ap_cw_floor = 7;
  const auto d = decide_params(in);
  REQUIRE(d.ok);
  CHECK(d.cw_up == 127);
  CHECK(d.n_txop_down == 1);
  CHECK(d.cw_down == 13);
  in.cw_up_cap = 124;
  CHECK_FALSE(decide_params(in).ok);
}

TEST_CASE("decision without a valid pair keeps parameters") {
  DecisionInput in;
  in.e_d = 1000;
  in.ap_cw_floor = 7;
  const auto d = decide_params(in);
  CHECK_FALSE(d.ok);
  CHECK(d.cw_up == 31);
  CHECK_FALSE(d.warning.empty());
}

TEST_CASE("tuning dead band") {
  TuneInput in;
  in.u_measured = 1.02;
  CHECK(tune_params(in).action == TuneAction::None);
  CHECK(tune_params(in).cw_down == 31);

  in.u_measured = 1.5;
  auto r = tune_params(in);
  CHECK(r.action == TuneAction::StepHigh);
  CHECK(r.cw_down == 26);

  in.u_measured = 0.9;
  r = tune_params(in);
  CHECK(r.action == TuneAction::StepLow);
  CHECK(r.cw_down == 32);

  in.u_measured.reset();
  CHECK(tune_params(in).action == TuneAction::None);
}

TEST_CASE("tuning at the priority floor") {
  TuneInput in;
  in.u_measured = 1.5;
  in.cw_down = 9;
  in.ap_cw_floor = 7;
  auto r = tune_params(in);
  CHECK(r.action == TuneAction::DoubledBoth);
  CHECK(r.cw_up == 63);
  CHECK(r.cw_down == 19);

  in.cw_up = 127;
  r = tune_params(in);
  CHECK(r.action == TuneAction::DoubledDownAndTxop);
  CHECK(r.n_txop_down == 2);

  in.n_txop_down = 8;
  r = tune_params(in);
  CHECK(r.action == TuneAction::ClampedToFloor);
  CHECK(r.cw_down == 7);
}

TEST_CASE("epda") {
  EpdaInput in;
  in.q_thresh = 20;
  in.avg_queue = 30;
  CHECK(epda_tune(in).cw_down == 30);
  in.avg_queue = 5;
  CHECK(epda_tune(in).cw_down == 32);
  in.avg_queue = 20;
  CHECK(epda_tune(in).action == TuneAction::None);
  CHECK(epda_tune(in).cw_down == 31);
}

TEST_CASE("fra") {
  CHECK(fra_drop_probability(50, 40) == doctest::Approx(0.2));
  CHECK(fra_drop_probability(30, 40) == doctest::Approx(0));
  CHECK(fra_drop_probability(80, 40) == doctest::Approx(0.5));
  CHECK_THROWS_AS(fra_drop_probability(0, 40), ContractViolation);
}

TEST_CASE("double_window stays on the ladder") {
  CHECK(double_window(31) == 63);
  CHECK(double_window(0) == 1);
}

namespace {

mac::Frame frame(int station, Direction dir) {
  mac::Frame f;
  f.station_id = station;
  f.direction = dir;
  f.ac = 1;
  return f;
}

struct Bench {
  FairController c;
  explicit Bench(Scheme s)
      : c(
            [&] {
              ControllerConfig cfg;
              cfg.scheme = s;
              return cfg;
            }(),
            mac::default_ac_params(), mac::default_ac_params(), traffic()) {}

  static std::array<AcTraffic, mac::kNumAcs> traffic() {
    std::array<AcTraffic, mac::kNumAcs> t{};
    for (auto& x : t) x.t_exc = 303;
    return t;
  }

  // Saturated 2 up + 2 down: uplinks deliver 50 each, downlinks offer 200
  // and get 20 each.
  void interval(bool with_station_4 = true) {
    for (int i = 0; i < 50; ++i) {
      c.note_delivery(false, frame(1, Direction::Uplink));
      c.note_delivery(false, frame(2, Direction::Uplink));
    }
    for (int i = 0; i < 200; ++i) {
      c.note_downlink_arrival(frame(3, Direction::Downlink));
      if (with_station_4) c.note_downlink_arrival(frame(4, Direction::Downlink));
    }
    for (int i = 0; i < 20; ++i) {
      c.note_delivery(true, frame(3, Direction::Downlink));
      if (with_station_4) c.note_delivery(true, frame(4, Direction::Downlink));
    }
    c.run_adaptation_interval(kMicrosPerSecond * (c.intervals() + 1), {});
  }

  const ControllerRecord& last() const { return c.records().back(); }
};

}  // namespace

TEST_CASE("controller path selection") {
  Bench b(Scheme::Wfa);
  b.interval();
  CHECK(b.last().path == AdaptPath::Decision);
  CHECK(b.last().n_up == 2);
  CHECK(b.last().n_down == 2);
  CHECK(b.last().n_sat_down == 2);
  CHECK(b.c.ap_params()[1].cw_min < 31);

  b.interval();
  CHECK(b.last().path == AdaptPath::Tuning);
  b.interval();
  CHECK(b.last().path == AdaptPath::Tuning);

  b.interval(false);
  b.interval(false);
  bool redecided = false;
  for (std::size_t i = b.c.records().size() - 2; i < b.c.records().size(); ++i) {
    if (b.c.records()[i].path == AdaptPath::Decision) redecided = true;
  }
  CHECK(redecided);
}

TEST_CASE("default scheme never touches parameters") {
  Bench b(Scheme::Default);
  for (int i = 0; i < 5; ++i) b.interval();
  CHECK(b.last().path == AdaptPath::Idle);
  CHECK(b.c.ap_params() == mac::default_ac_params());
  CHECK(b.c.sta_params() == mac::default_ac_params());
}

TEST_CASE("fra filters saturated downlink only") {
  Bench b(Scheme::Wfa);
  b.interval();
  b.interval();
  CHECK(b.c.fra_probability(1, 3) > 0.5);
  CHECK(b.c.fra_probability(1, 1) == doctest::Approx(0));
}

TEST_CASE("controller config validation") {
  ControllerConfig cfg;
  cfg.beta = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(parse_scheme("fast"), ConfigError);
  CHECK(parse_scheme("epda") == Scheme::Epda);
}

#include <limits>
#include <vector>

#include "doctest.h"
#include "edcafair/errors.hpp"
#include "edcafair/metrics/metrics.hpp"

using namespace edcafair;
using namespace edcafair::metrics;

TEST_CASE("jain index") {
  CHECK(jain_index(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(1.0));
  CHECK(jain_index(std::vector<double>{1, 0, 0, 0}) == doctest::Approx(0.25));
  CHECK(jain_index(std::vector<double>{2, 1}) == doctest::Approx(0.9));
  CHECK_THROWS_AS(jain_index(std::vector<double>{}), ContractViolation);
  CHECK_THROWS_AS(jain_index(std::vector<double>{0, 0}), ContractViolation);
  CHECK_THROWS_AS(jain_index(std::vector<double>{1, -1}), ContractViolation);
}

TEST_CASE("packet loss rate") {
  CHECK(*packet_loss_rate(100, 0) == doctest::Approx(0));
  CHECK(*packet_loss_rate(100, 25) == doctest::Approx(0.25));
  CHECK_FALSE(packet_loss_rate(0, 0));
}

TEST_CASE("delay and jitter") {
  const auto c = delay_jitter(std::vector<double>{5000, 5000, 5000});
  CHECK(*c.mean_delay_us == doctest::Approx(5000));
  CHECK(*c.jitter_us == doctest::Approx(0));

  const auto v = delay_jitter(std::vector<double>{2000, 4000, 2000});
  CHECK(*v.mean_delay_us == doctest::Approx(2666.6667));
  CHECK(*v.jitter_us == doctest::Approx(2000));

  const auto one = delay_jitter(std::vector<double>{7});
  CHECK(one.mean_delay_us);
  CHECK_FALSE(one.jitter_us);
  CHECK_FALSE(delay_jitter(std::vector<double>{}).mean_delay_us);
}

TEST_CASE("access ratio") {
  CHECK(*access_ratio(std::vector<double>{50, 50}, std::vector<double>{50}) == doctest::Approx(1.0));
  CHECK(*access_ratio(std::vector<double>{80}, std::vector<double>{40}) == doctest::Approx(2.0));
  CHECK_FALSE(access_ratio(std::vector<double>{80}, std::vector<double>{}));
}

namespace {

TraceRecord rec(SimTime t, TraceEvent ev, int station, Direction dir, int host = 1) {
  TraceRecord r;
  r.time = t;
  r.event = ev;
  r.station = station;
  r.direction = dir;
  r.host = host;
  r.flow_id = station;
  r.ac = 1;
  r.bytes = 1000;
  return r;
}

}  // namespace

TEST_CASE("completion times") {
  Trace t;
  auto start = rec(2 * kMicrosPerSecond, TraceEvent::FlowStart, 1, Direction::Uplink, -1);
  auto done = rec(12 * kMicrosPerSecond, TraceEvent::FlowComplete, 1, Direction::Uplink, -1);
  auto other = rec(3 * kMicrosPerSecond, TraceEvent::FlowStart, 2, Direction::Uplink, -1);
  t.add(start);
  t.add(other);
  t.add(done);
  const auto c = completion_times(t, std::vector<int>{1, 2});
  REQUIRE(c.size() == 2);
  CHECK(*c[0].duration == 10 * kMicrosPerSecond);
  CHECK_FALSE(c[1].duration);
}

TEST_CASE("throughput series and fairness report") {
  Trace t;
  for (int i = 0; i < 10; ++i) {
    t.add(rec(i * 100000, TraceEvent::Enqueued, 1, Direction::Uplink));
    t.add(rec(i * 100000 + 10, TraceEvent::Delivered, 1, Direction::Uplink));
    t.add(rec(i * 100000, TraceEvent::Enqueued, 2, Direction::Downlink, 0));
    t.add(rec(i * 100000 + 10, TraceEvent::Delivered, 2, Direction::Downlink, 0));
  }
  auto overflow = rec(500, TraceEvent::Dropped, 3, Direction::Downlink, 0);
  overflow.reason = DropReason::BufferOverflow;
  t.add(overflow);
  t.add(rec(700, TraceEvent::Enqueued, 4, Direction::Uplink));
  t.add(rec(800, TraceEvent::Delivered, 4, Direction::Uplink));
  t.add(rec(750, TraceEvent::Enqueued, 4, Direction::Uplink));
  auto retry = rec(900, TraceEvent::Dropped, 4, Direction::Uplink);
  retry.reason = DropReason::RetryLimit;
  t.add(retry);

  const auto series = throughput_series(t, kMicrosPerSecond / 2, kMicrosPerSecond);
  REQUIRE(series.size() == 6);
  CHECK(series[0].delivered_bits == 5 * 8000);
  CHECK(series[3].window_start == kMicrosPerSecond / 2);

  const auto rep =
      fairness_report(t, 1, 0, kMicrosPerSecond, {{1, Direction::Uplink}, {2, Direction::Downlink}});
  CHECK(rep.n_saturated == 2);
  CHECK(*rep.jain_f == doctest::Approx(1.0));
  REQUIRE(rep.mean_plr_nonsat);
  CHECK(*rep.mean_plr_nonsat == doctest::Approx(0.5));

  for (const auto& s : rep.stations) {
    if (s.station_id == 4) {
      CHECK(s.arrivals == 2);
      CHECK(s.drops == 0);
      CHECK(s.retry_drops == 1);
    }
  }

  const auto none = fairness_report(t, 1, 0, kMicrosPerSecond, {});
  CHECK_FALSE(none.jain_f);
  CHECK(none.n_saturated == 0);
}

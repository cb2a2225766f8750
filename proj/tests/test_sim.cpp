#include <cmath>
#include <vector>

#include "doctest.h"
#include "edcafair/sim/random.hpp"
#include "edcafair/sim/simulator.hpp"

using namespace edcafair;
using edcafair::sim::Simulator;

TEST_CASE("events dispatch in time order") {
  Simulator s;
  std::vector<SimTime> seen;
  s.schedule(100, [&] { seen.push_back(s.now()); });
  s.schedule(50, [&] { seen.push_back(s.now()); });
  s.run_until(1000);
  CHECK(seen == std::vector<SimTime>{50, 100});
}

TEST_CASE("equal times dispatch in scheduling order") {
  Simulator s;
  std::string order;
  s.schedule(100, [&] { order += 'A'; });
  s.schedule(100, [&] { order += 'B'; });
  s.run_until(100);
  CHECK(order == "AB");
}

TEST_CASE("scheduling in the past throws") {
  Simulator s;
  s.run_until(20);
  CHECK_THROWS_AS(s.schedule(10, [] {}), sim::SchedulingError);
}

TEST_CASE("run_until boundaries") {
  Simulator s;
  CHECK(s.run_until(kMicrosPerSecond) == 0);
  CHECK(s.now() == kMicrosPerSecond);

  Simulator t;
  int fired = 0;
  for (SimTime at : {10, 20, 30, 40}) t.schedule(at, [&] { ++fired; });
  CHECK(t.run_until(30) == 3);
  CHECK(fired == 3);
  CHECK(t.queued() == 1);
}

TEST_CASE("handlers may schedule inside the window") {
  Simulator s;
  int fired = 0;
  s.schedule(10, [&] {
    ++fired;
    s.schedule_in(5, [&] { ++fired; });
  });
  s.run_until(20);
  CHECK(fired == 2);
}

TEST_CASE("cancel") {
  Simulator s;
  int fired = 0;
  auto id = s.schedule(10, [&] { ++fired; });
  CHECK(s.pending(id));
  s.cancel(id);
  s.cancel(id);
  s.run_until(20);
  CHECK(fired == 0);
}

TEST_CASE("random source") {
  sim::RandomSource a(7), b(7);
  CHECK(a.uniform_int(0, 0) == 0);
  b.uniform_int(0, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform_int(0, 1000) == b.uniform_int(0, 1000));
  CHECK_THROWS(a.uniform_int(3, 2));
  CHECK_FALSE(a.bernoulli(0.0));
  CHECK(a.bernoulli(1.0));
}

TEST_CASE("uniform_int passes a chi-square test") {
  // 16 bins, 160000 draws; the 0.999 quantile of chi2(15) is 37.7.
  sim::RandomSource r(12345);
  constexpr int kBins = 16;
  constexpr int kDraws = 160000;
  std::vector<int> count(kBins, 0);
  for (int i = 0; i < kDraws; ++i) ++count[static_cast<std::size_t>(r.uniform_int(0, kBins - 1))];
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 37.7);
}

TEST_CASE("exponential sample mean") {
  sim::RandomSource r(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += r.exponential(1000.0);
  CHECK(std::abs(sum / 100000 - 1000.0) < 20.0);
}

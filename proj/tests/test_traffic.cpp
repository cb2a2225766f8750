#include <cmath>

#include "doctest.h"
#include "edcafair/errors.hpp"
#include "edcafair/traffic/flows.hpp"
#include "edcafair/traffic/tcp.hpp"

using namespace edcafair;
using namespace edcafair::traffic;

TEST_CASE("poisson interarrivals") {
  sim::RandomSource a(9), b(9);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const SimTime x = next_poisson_arrival(12e6, 1500, a);
    CHECK(x == next_poisson_arrival(12e6, 1500, b));
    sum += static_cast<double>(x);
  }
  const double mean = sum / 100000;
  CHECK(mean > 980.0);
  CHECK(mean < 1020.0);
  CHECK_THROWS_AS(next_poisson_arrival(0.0, 1500, a), ContractViolation);
}

TEST_CASE("slow start and the advertised window") {
  auto s = make_tcp_state(42, TcpTimers{});
  s.cwnd = 1;
  s.ssthresh = 32;
  s.next_seq = 1;
  tcp_on_ack(s, 1, 1000);
  CHECK(s.cwnd == doctest::Approx(2.0));

  s.cwnd = 42;
  s.ssthresh = 10;
  s.next_seq = 43;
  tcp_on_ack(s, 2, 2000);
  CHECK(s.cwnd == doctest::Approx(42.0));
}

TEST_CASE("cumulative ack releases several packets") {
  auto s = make_tcp_state(42, TcpTimers{});
  s.cwnd = 10;
  s.next_seq = 5;
  REQUIRE(s.in_flight() == 5);
  const auto r = tcp_on_ack(s, 5, 100);
  CHECK(r.newly_acked == 5);
  CHECK(s.in_flight() == 0);
}

TEST_CASE("third duplicate ack triggers fast retransmit") {
  auto s = make_tcp_state(42, TcpTimers{});
  s.cwnd = 10;
  s.next_seq = 10;
  tcp_on_ack(s, 3, 100);
  CHECK_FALSE(tcp_on_ack(s, 3, 110).fast_retransmit);
  CHECK_FALSE(tcp_on_ack(s, 3, 120).fast_retransmit);
  CHECK(tcp_on_ack(s, 3, 130).fast_retransmit);
}

TEST_CASE("timeout halves and backs off") {
  auto s = make_tcp_state(42, TcpTimers{});
  s.cwnd = 42;
  s.next_seq = 42;
  const SimTime rto = s.rto;
  CHECK(tcp_on_timeout(s));
  CHECK(s.cwnd == doctest::Approx(1.0));
  CHECK(s.ssthresh == doctest::Approx(21.0));
  CHECK(s.rto == 2 * rto);
  for (int i = 0; i < 20; ++i) {
    s.next_seq = s.highest_ack + 5;
    tcp_on_timeout(s);
  }
  CHECK(s.rto == s.rto_max);

  auto idle = make_tcp_state(42, TcpTimers{});
  const auto before = idle.cwnd;
  CHECK_FALSE(tcp_on_timeout(idle));
  CHECK(idle.cwnd == before);
}

TEST_CASE("delayed ack receiver") {
  TcpReceiver plain(1);
  int acks = 0;
  for (int i = 0; i < 5; ++i) acks += plain.on_data(i).ack_now ? 1 : 0;
  CHECK(acks == 5);

  TcpReceiver two(2);
  acks = 0;
  for (int i = 0; i < 4; ++i) acks += two.on_data(i).ack_now ? 1 : 0;
  CHECK(acks == 2);

  TcpReceiver lone(2);
  const auto a = lone.on_data(0);
  CHECK_FALSE(a.ack_now);
  CHECK(a.arm_timer);
  const auto flushed = lone.on_timer();
  REQUIRE(flushed);
  CHECK(*flushed == 1);
  CHECK_FALSE(lone.on_timer());
}

TEST_CASE("out of order data is acked immediately") {
  TcpReceiver r(2);
  r.on_data(0);
  const auto a = r.on_data(2);
  REQUIRE(a.ack_now);
  CHECK(*a.ack_now == 1);
  const auto b = r.on_data(1);
  REQUIRE(b.ack_now);
  CHECK(*b.ack_now == 3);
}

TEST_CASE("flow spec validation") {
  FlowSpec f;
  f.rate_bps = 1e6;
  f.stop = kMicrosPerSecond;
  CHECK_NOTHROW(f.validate());
  FlowSpec bad = f;
  bad.stop = 0;
  bad.start = 10;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  FlowSpec short_flow = f;
  short_flow.transport = Transport::Tcp;
  short_flow.agent = AgentKind::Short;
  short_flow.total_packets = 0;
  CHECK_THROWS_AS(short_flow.validate(), ConfigError);
}

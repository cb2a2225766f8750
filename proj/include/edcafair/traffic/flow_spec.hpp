#pragma once

#include <cstdint>
#include <string_view>

#include "edcafair/sim/time.hpp"
#include "edcafair/trace.hpp"

namespace edcafair::traffic {

enum class Transport : std::uint8_t { Udp, Tcp };

/// Application model driving a flow.
///  - poisson: exponential packet interarrivals at `rate_bps` (UDP)
///  - ftp:     unlimited backlog, or `total_packets` when nonzero (TCP)
///  - telnet:  Poisson packet arrivals at `rate_bps` fed into TCP
///  - short:   `total_packets` to transfer, then the flow leaves (TCP)
enum class AgentKind : std::uint8_t { Poisson, Ftp, Telnet, Short };

struct FlowSpec {
  int flow_id = 0;
  int station_id = 1;
  Direction direction = Direction::Uplink;
  Transport transport = Transport::Udp;
  AgentKind agent = AgentKind::Poisson;
  double rate_bps = 0.0;
  std::int64_t total_packets = 0;
  SimTime start = 0;
  SimTime stop = 0;
  int packet_size = 1500;
  int ac = 1;
  SimTime wired_delay = 0;  ///< one-way delay of the wired segment
  int adv_window = 42;      ///< receiver advertised window, packets
  int delack = 1;           ///< data packets per TCP ACK

  /// Throws ConfigError on an inconsistent spec.
  void validate() const;

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

std::string_view to_string(Transport t);
std::string_view to_string(AgentKind a);

}  // namespace edcafair::traffic

#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "edcafair/mac/ac_queue.hpp"
#include "edcafair/sim/simulator.hpp"
#include "edcafair/traffic/flow_spec.hpp"
#include "edcafair/traffic/tcp.hpp"

namespace edcafair::traffic {

/// Mean interarrival (us) is packet_size * 8 / rate. Throws
/// ContractViolation for a nonpositive rate.
SimTime next_poisson_arrival(double rate_bps, int packet_size, sim::RandomSource& rng);

/// Network side seen by a flow: where its packets go once they leave an
/// endpoint. Routing over wired and wireless hops belongs to the caller.
class FlowIo {
 public:
  virtual ~FlowIo() = default;
  virtual void from_sender(const FlowSpec& flow, mac::Frame frame) = 0;
  virtual void from_receiver(const FlowSpec& flow, mac::Frame frame) = 0;
};

struct FlowCounters {
  std::uint64_t generated = 0;      ///< distinct data packets created by the source
  std::uint64_t transmissions = 0;  ///< data packets handed to the network, including resends
  std::uint64_t received = 0;       ///< distinct data packets at the receiver
  std::uint64_t acks_sent = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t fast_retransmits = 0;
  std::optional<SimTime> completed_at;
};

class Flow {
 public:
  Flow(FlowSpec spec, sim::Simulator& sim, FlowIo& io, Trace* trace);
  virtual ~Flow() = default;

  Flow(const Flow&) = delete;
  Flow& operator=(const Flow&) = delete;

  /// Schedules the start and stop events.
  void install();

  virtual void deliver_to_receiver(const mac::Frame& frame) = 0;
  virtual void deliver_to_sender(const mac::Frame& frame) { (void)frame; }

  const FlowSpec& spec() const { return spec_; }
  const FlowCounters& counters() const { return counters_; }
  bool active() const { return active_; }

 protected:
  virtual void on_start() = 0;
  virtual void on_stop() {}
  void stop_now();
  mac::Frame make_frame(FrameKind kind, std::int64_t seq) const;
  void trace_flow(TraceEvent ev, int bytes = 0);

  FlowSpec spec_;
  sim::Simulator& sim_;
  FlowIo& io_;
  Trace* trace_;
  FlowCounters counters_;
  bool active_ = false;
  bool finished_ = false;
};

std::unique_ptr<Flow> make_flow(const FlowSpec& spec, sim::Simulator& sim, FlowIo& io, Trace* trace,
                                const TcpTimers& timers);

/// Poisson UDP source with a counting sink.
class UdpFlow final : public Flow {
 public:
  using Flow::Flow;
  void deliver_to_receiver(const mac::Frame& frame) override;

 private:
  void on_start() override;
  void on_stop() override;
  void arrival();

  sim::EventId next_;
};

/// Window-limited TCP connection carrying an FTP, Telnet, or short transfer.
class TcpFlow final : public Flow {
 public:
  TcpFlow(FlowSpec spec, sim::Simulator& sim, FlowIo& io, Trace* trace, const TcpTimers& timers);

  void deliver_to_receiver(const mac::Frame& frame) override;
  void deliver_to_sender(const mac::Frame& frame) override;

  const TcpConnState& state() const { return conn_; }
  const TcpReceiver& receiver() const { return receiver_; }

 private:
  void on_start() override;
  void on_stop() override;
  void app_arrival();
  std::int64_t app_limit() const;
  void pump();
  void send_data(std::int64_t seq, bool retransmission);
  void send_ack(std::int64_t cum_ack);
  void arm_rto();
  void on_rto();
  void on_delack_timer();

  TcpTimers timers_;
  TcpConnState conn_;
  TcpReceiver receiver_;
  std::int64_t app_packets_ = 0;  // telnet backlog produced so far
  std::int64_t highest_sent_ = -1;
  sim::EventId rto_event_;
  sim::EventId delack_event_;
  sim::EventId app_event_;
};

}  // namespace edcafair::traffic

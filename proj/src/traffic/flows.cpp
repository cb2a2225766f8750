#include "edcafair/traffic/flows.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "edcafair/errors.hpp"

namespace edcafair::traffic {

std::string_view to_string(Transport t) { return t == Transport::Udp ? "udp" : "tcp"; }

std::string_view to_string(AgentKind a) {
  switch (a) {
    case AgentKind::Poisson: return "poisson";
    case AgentKind::Ftp: return "ftp";
    case AgentKind::Telnet: return "telnet";
    case AgentKind::Short: return "short";
  }
  return "?";
}

void FlowSpec::validate() const {
  const std::string where = "flow " + std::to_string(flow_id) + ": ";
  if (start >= stop) throw ConfigError(where + "start must precede stop");
  if (packet_size <= 0) throw ConfigError(where + "packet size must be positive");
  if (ac < 0 || ac > 3) throw ConfigError(where + "access category must be 0-3");
  if (wired_delay < 0) throw ConfigError(where + "wired delay must be >= 0");
  if ((agent == AgentKind::Poisson || agent == AgentKind::Telnet) && !(rate_bps > 0)) {
    throw ConfigError(where + "rate must be positive for rate-driven agents");
  }
  if (agent == AgentKind::Short && total_packets <= 0) throw ConfigError(where + "short flows need total > 0");
  if (total_packets < 0) throw ConfigError(where + "total must be >= 0");
  if (transport == Transport::Udp && agent != AgentKind::Poisson) {
    throw ConfigError(where + "udp flows use the poisson agent");
  }
  if (transport == Transport::Tcp && agent == AgentKind::Poisson) {
    throw ConfigError(where + "tcp flows use ftp, telnet or short agents");
  }
  if (adv_window < 1) throw ConfigError(where + "advertised window must be >= 1");
  if (delack < 1) throw ConfigError(where + "delayed-ack factor must be >= 1");
}

SimTime next_poisson_arrival(double rate_bps, int packet_size, sim::RandomSource& rng) {
  if (!(rate_bps > 0)) throw ContractViolation("poisson rate must be positive");
  const double mean_us = static_cast<double>(packet_size) * 8.0 * 1e6 / rate_bps;
  return static_cast<SimTime>(std::llround(rng.exponential(mean_us)));
}

Flow::Flow(FlowSpec spec, sim::Simulator& sim, FlowIo& io, Trace* trace)
    : spec_(std::move(spec)), sim_(sim), io_(io), trace_(trace) {}

void Flow::install() {
  sim_.schedule(spec_.start, [this] {
    active_ = true;
    trace_flow(TraceEvent::FlowStart);
    on_start();
  });
  sim_.schedule(spec_.stop, [this] { stop_now(); });
}

void Flow::stop_now() {
  if (finished_) return;
  finished_ = true;
  active_ = false;
  on_stop();
  trace_flow(TraceEvent::FlowStop);
}

mac::Frame Flow::make_frame(FrameKind kind, std::int64_t seq) const {
  mac::Frame f;
  f.flow_id = spec_.flow_id;
  f.station_id = spec_.station_id;
  f.kind = kind;
  f.seq = seq;
  f.ac = spec_.ac;
  if (kind == FrameKind::Data) {
    f.bytes = spec_.packet_size;
    f.direction = spec_.direction;
  } else {
    f.bytes = kTcpAckBytes;
    f.direction = spec_.direction == Direction::Uplink ? Direction::Downlink : Direction::Uplink;
  }
  return f;
}

void Flow::trace_flow(TraceEvent ev, int bytes) {
  if (trace_ == nullptr) return;
  TraceRecord r;
  r.time = sim_.now();
  r.flow_id = spec_.flow_id;
  r.station = spec_.station_id;
  r.host = -1;
  r.bytes = bytes;
  r.ac = static_cast<std::uint8_t>(spec_.ac);
  r.event = ev;
  r.direction = spec_.direction;
  r.kind = FrameKind::Data;
  trace_->add(r);
}

std::unique_ptr<Flow> make_flow(const FlowSpec& spec, sim::Simulator& sim, FlowIo& io, Trace* trace,
                                const TcpTimers& timers) {
  spec.validate();
  if (spec.transport == Transport::Udp) return std::make_unique<UdpFlow>(spec, sim, io, trace);
  return std::make_unique<TcpFlow>(spec, sim, io, trace, timers);
}

// UDP

void UdpFlow::on_start() { arrival(); }

void UdpFlow::on_stop() { sim_.cancel(next_); }

void UdpFlow::arrival() {
  if (!active_) return;
  mac::Frame f = make_frame(FrameKind::Data, static_cast<std::int64_t>(counters_.generated));
  ++counters_.generated;
  ++counters_.transmissions;
  trace_flow(TraceEvent::Generated, f.bytes);
  io_.from_sender(spec_, f);
  const SimTime gap = next_poisson_arrival(spec_.rate_bps, spec_.packet_size, sim_.rng());
  const SimTime at = sim_.now() + gap;
  if (at < spec_.stop) next_ = sim_.schedule(at, [this] { arrival(); });
}

void UdpFlow::deliver_to_receiver(const mac::Frame& frame) {
  (void)frame;
  ++counters_.received;
}

// TCP

TcpFlow::TcpFlow(FlowSpec spec, sim::Simulator& sim, FlowIo& io, Trace* trace, const TcpTimers& timers)
    : Flow(std::move(spec), sim, io, trace),
      timers_(timers),
      conn_(make_tcp_state(spec_.adv_window, timers)),
      receiver_(spec_.delack) {}

std::int64_t TcpFlow::app_limit() const {
  switch (spec_.agent) {
    case AgentKind::Telnet: return app_packets_;
    case AgentKind::Short: return spec_.total_packets;
    case AgentKind::Ftp:
      return spec_.total_packets > 0 ? spec_.total_packets : std::numeric_limits<std::int64_t>::max();
    case AgentKind::Poisson: break;
  }
  return 0;
}

void TcpFlow::on_start() {
  if (spec_.agent == AgentKind::Telnet) {
    app_arrival();
  } else {
    pump();
  }
}

void TcpFlow::on_stop() {
  sim_.cancel(rto_event_);
  sim_.cancel(delack_event_);
  sim_.cancel(app_event_);
}

void TcpFlow::app_arrival() {
  if (!active_) return;
  ++app_packets_;
  pump();
  const SimTime at = sim_.now() + next_poisson_arrival(spec_.rate_bps, spec_.packet_size, sim_.rng());
  if (at < spec_.stop) app_event_ = sim_.schedule(at, [this] { app_arrival(); });
}

void TcpFlow::pump() {
  if (!active_) return;
  const std::int64_t limit = app_limit();
  while (conn_.window_room() > 0 && conn_.next_seq < limit) {
    const std::int64_t seq = conn_.next_seq++;
    send_data(seq, seq <= highest_sent_);
  }
}

void TcpFlow::send_data(std::int64_t seq, bool retransmission) {
  if (seq > highest_sent_) {
    highest_sent_ = seq;
    ++counters_.generated;
    trace_flow(TraceEvent::Generated, spec_.packet_size);
  }
  ++counters_.transmissions;
  tcp_on_send(conn_, seq, retransmission, sim_.now());
  if (!sim_.pending(rto_event_)) arm_rto();
  io_.from_sender(spec_, make_frame(FrameKind::Data, seq));
}

void TcpFlow::arm_rto() {
  sim_.cancel(rto_event_);
  rto_event_ = sim_.schedule_in(conn_.rto, [this] { on_rto(); });
}

void TcpFlow::on_rto() {
  if (!active_) return;
  if (tcp_on_timeout(conn_)) {
    ++counters_.timeouts;
    arm_rto();
    pump();
  }
}

void TcpFlow::deliver_to_sender(const mac::Frame& frame) {
  if (!active_ || frame.kind != FrameKind::TransportAck) return;
  const AckResult r = tcp_on_ack(conn_, frame.seq, sim_.now());
  if (r.stale) return;
  if (r.fast_retransmit) {
    ++counters_.fast_retransmits;
    send_data(conn_.highest_ack, true);
    arm_rto();
    return;
  }
  if (r.newly_acked > 0) {
    if (spec_.agent != AgentKind::Telnet && spec_.total_packets > 0 && conn_.highest_ack >= spec_.total_packets) {
      counters_.completed_at = sim_.now();
      trace_flow(TraceEvent::FlowComplete);
      stop_now();
      return;
    }
    if (conn_.in_flight() > 0) {
      arm_rto();
    } else {
      sim_.cancel(rto_event_);
    }
  }
  pump();
}

void TcpFlow::deliver_to_receiver(const mac::Frame& frame) {
  if (!active_ || frame.kind != FrameKind::Data) return;
  const TcpReceiver::Action a = receiver_.on_data(frame.seq);
  counters_.received = static_cast<std::uint64_t>(receiver_.expected());
  if (a.ack_now) send_ack(*a.ack_now);
  if (a.arm_timer) {
    delack_event_ = sim_.schedule_in(timers_.delack_timeout, [this] { on_delack_timer(); });
  }
}

void TcpFlow::on_delack_timer() {
  if (auto ack = receiver_.on_timer()) send_ack(*ack);
}

void TcpFlow::send_ack(std::int64_t cum_ack) {
  ++counters_.acks_sent;
  io_.from_receiver(spec_, make_frame(FrameKind::TransportAck, cum_ack));
}

}  // namespace edcafair::traffic

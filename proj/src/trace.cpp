#include "edcafair/trace.hpp"

namespace edcafair {

std::string_view to_string(Direction d) { return d == Direction::Uplink ? "uplink" : "downlink"; }

std::string_view to_string(FrameKind k) { return k == FrameKind::Data ? "data" : "ack"; }

std::string_view to_string(TraceEvent e) {
  switch (e) {
    case TraceEvent::Generated: return "generated";
    case TraceEvent::Enqueued: return "enqueued";
    case TraceEvent::Dropped: return "dropped";
    case TraceEvent::Delivered: return "delivered";
    case TraceEvent::FlowStart: return "flow_start";
    case TraceEvent::FlowStop: return "flow_stop";
    case TraceEvent::FlowComplete: return "flow_complete";
  }
  return "?";
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::None: return "";
    case DropReason::BufferOverflow: return "overflow";
    case DropReason::FraFilter: return "fra";
    case DropReason::RetryLimit: return "retry";
  }
  return "?";
}

}  // namespace edcafair

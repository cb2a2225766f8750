#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "edcafair/sim/time.hpp"

namespace edcafair {

enum class Direction : std::uint8_t { Uplink, Downlink };
enum class FrameKind : std::uint8_t { Data, TransportAck };

enum class TraceEvent : std::uint8_t {
  Generated,     // transport handed a packet to the network
  Enqueued,      // accepted into a MAC queue
  Dropped,       // lost before delivery, see DropReason
  Delivered,     // MAC-level successful exchange
  FlowStart,
  FlowStop,
  FlowComplete,  // short transfer fully acknowledged
};

enum class DropReason : std::uint8_t { None, BufferOverflow, FraFilter, RetryLimit };

/// One record of the per-event trace stream.
///
/// `host` is the MAC entity owning the queue (0 = AP, otherwise the station's
/// host index). `station` is always the wireless station the frame belongs to.
/// `direction` is the direction of the frame itself over the air.
struct TraceRecord {
  SimTime time = 0;
  SimTime enqueue_time = -1;
  std::int32_t flow_id = -1;
  std::int32_t station = -1;
  std::int32_t host = -1;
  std::int32_t bytes = 0;
  std::uint8_t ac = 0;
  TraceEvent event = TraceEvent::Generated;
  DropReason reason = DropReason::None;
  Direction direction = Direction::Uplink;
  FrameKind kind = FrameKind::Data;
};

class Trace {
 public:
  void add(const TraceRecord& r) { records_.push_back(r); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  void reserve(std::size_t n) { records_.reserve(n); }

 private:
  std::vector<TraceRecord> records_;
};

std::string_view to_string(Direction d);
std::string_view to_string(FrameKind k);
std::string_view to_string(TraceEvent e);
std::string_view to_string(DropReason r);

}  // namespace edcafair

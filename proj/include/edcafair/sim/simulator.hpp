#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "edcafair/sim/random.hpp"
#include "edcafair/sim/time.hpp"

namespace edcafair::sim {

/// Handle returned by Simulator::schedule; used for cancellation.
struct EventId {
  std::uint64_t value = 0;
  bool valid() const { return value != 0; }
  friend bool operator==(EventId, EventId) = default;
};

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Single-threaded discrete event kernel with a virtual microsecond clock.
///
/// Events fire in nondecreasing time order. Events with equal fire time fire
/// in the order they were scheduled. Handlers may schedule further events,
/// including at the current time.
class Simulator {
 public:
  using Handler = std::function<void()>;

  explicit Simulator(std::uint64_t seed = 1) : rng_(seed) {}

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Throws SchedulingError if `at` lies before now().
  EventId schedule(SimTime at, Handler handler);
  EventId schedule_in(SimTime delay, Handler handler) { return schedule(now_ + delay, std::move(handler)); }

  /// Cancelling an already dispatched or unknown event is a no-op.
  void cancel(EventId id);
  bool pending(EventId id) const { return handlers_.contains(id.value); }

  /// Dispatches every event with fire time <= end, then sets the clock to end.
  std::size_t run_until(SimTime end);

  SimTime now() const { return now_; }
  std::size_t queued() const { return handlers_.size(); }
  RandomSource& rng() { return rng_; }

 private:
  struct Entry {
    SimTime time;
    std::uint64_t seq;
    bool operator>(const Entry& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::unordered_map<std::uint64_t, Handler> handlers_;
  RandomSource rng_;
};

}  // namespace edcafair::sim

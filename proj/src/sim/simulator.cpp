#include "edcafair/sim/simulator.hpp"

#include <cmath>
#include <string>

namespace edcafair::sim {

EventId Simulator::schedule(SimTime at, Handler handler) {
  if (at < now_) {
    throw SchedulingError("event scheduled in the past: t=" + std::to_string(at) + "us, now=" +
                          std::to_string(now_) + "us");
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push(Entry{at, seq});
  handlers_.emplace(seq, std::move(handler));
  return EventId{seq};
}

void Simulator::cancel(EventId id) { handlers_.erase(id.value); }

std::size_t Simulator::run_until(SimTime end) {
  if (end < now_) {
    throw SchedulingError("run_until target lies in the past");
  }
  std::size_t dispatched = 0;
  while (!queue_.empty() && queue_.top().time <= end) {
    const Entry e = queue_.top();
    queue_.pop();
    auto it = handlers_.find(e.seq);
    if (it == handlers_.end()) {
      continue;  // cancelled
    }
    Handler h = std::move(it->second);
    handlers_.erase(it);
    now_ = e.time;
    h();
    ++dispatched;
  }
  now_ = end;
  return dispatched;
}

std::int64_t RandomSource::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw std::invalid_argument("uniform_int: lo > hi");
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == UINT64_MAX) {
    return static_cast<std::int64_t>(engine_());
  }
  const std::uint64_t range = span + 1;
  // Rejection sampling keeps every value equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range + 1) % range;
  std::uint64_t x = engine_();
  while (x > limit) {
    x = engine_();
  }
  return lo + static_cast<std::int64_t>(x % range);
}

double RandomSource::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomSource::exponential(double mean) { return -mean * std::log1p(-uniform01()); }

bool RandomSource::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

}  // namespace edcafair::sim

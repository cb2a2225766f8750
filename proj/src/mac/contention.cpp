#include "edcafair/mac/contention.hpp"

#include <algorithm>
#include <map>

#include "edcafair/errors.hpp"

namespace edcafair::mac {

void Countdown::freeze_at(int busy_slot) {
  const int counted = busy_slot - start_slot;
  if (counted > 0) {
    backoff = std::max(0, backoff - counted);
  }
}

SlotOutcome resolve_slot(std::span<const Contender> contenders, double per, sim::RandomSource& rng) {
  if (contenders.empty()) {
    throw ContractViolation("resolve_slot needs at least one contender");
  }
  std::map<int, Contender> best_per_host;
  for (const Contender& c : contenders) {
    auto [it, inserted] = best_per_host.try_emplace(c.host, c);
    if (!inserted && c.ac > it->second.ac) {
      it->second = c;
    }
  }
  SlotOutcome out;
  for (const Contender& c : contenders) {
    if (best_per_host.at(c.host).ac != c.ac) {
      out.internal_losers.push_back(c);
    }
  }
  for (const auto& [host, c] : best_per_host) {
    out.on_air.push_back(c);
  }
  if (out.on_air.size() > 1) {
    out.kind = SlotOutcome::Kind::Collision;
  } else if (rng.bernoulli(per)) {
    out.kind = SlotOutcome::Kind::FrameError;
  } else {
    out.kind = SlotOutcome::Kind::Success;
  }
  return out;
}

std::size_t plan_txop(std::span<const int> payload_bytes, SimTime txop_limit, const PhyProfile& phy) {
  if (payload_bytes.empty()) return 0;
  if (txop_limit <= 0) return 1;
  std::size_t n = 0;
  SimTime used = 0;
  for (int bytes : payload_bytes) {
    const SimTime t = compute_t_exc(phy, bytes);
    if (n > 0 && used + t > txop_limit) break;
    used += t;
    ++n;
  }
  return n;
}

SimTime burst_duration(std::span<const int> payload_bytes, std::size_t frames, const PhyProfile& phy) {
  SimTime total = 0;
  for (std::size_t i = 0; i < frames && i < payload_bytes.size(); ++i) {
    if (i > 0) total += phy.sifs;
    total += compute_t_exc(phy, payload_bytes[i]);
  }
  return total;
}

}  // namespace edcafair::mac

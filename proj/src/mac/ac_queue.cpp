#include "edcafair/mac/ac_queue.hpp"

#include <algorithm>

#include "edcafair/errors.hpp"

namespace edcafair::mac {

AcQueue::AcQueue(int ac, std::size_t capacity, const EdcaParams& params)
    : ac_(ac), capacity_(capacity), params_(params), cw_(params.cw_min) {
  params_.validate();
  countdown.aifsn = params.aifsn;
  countdown.start_slot = params.aifsn;
}

void AcQueue::account(SimTime now) {
  length_integral_ += static_cast<double>(frames_.size()) * static_cast<double>(now - last_change_);
  last_change_ = now;
}

bool AcQueue::push(const Frame& f, SimTime now) {
  if (full()) return false;
  account(now);
  frames_.push_back(f);
  return true;
}

Frame AcQueue::pop_head(SimTime now) {
  if (frames_.empty()) throw ContractViolation("pop from empty AC queue");
  account(now);
  Frame f = std::move(frames_.front());
  frames_.pop_front();
  retries_ = 0;
  return f;
}

void AcQueue::set_params(const EdcaParams& p) {
  p.validate();
  params_ = p;
  cw_ = std::clamp(cw_, p.cw_min, p.cw_max);
  countdown.aifsn = p.aifsn;
}

bool AcQueue::on_attempt(TxOutcome outcome, int retry_limit, sim::RandomSource& rng) {
  bool discard = false;
  if (outcome == TxOutcome::Success) {
    retries_ = 0;
    cw_ = next_contention_window(cw_, params_, TxOutcome::Success);
  } else {
    ++retries_;
    if (retries_ >= retry_limit) {
      discard = true;
      retries_ = 0;
      cw_ = params_.cw_min;
    } else {
      cw_ = next_contention_window(cw_, params_, TxOutcome::Failure);
    }
  }
  draw_backoff(rng);
  return discard;
}

void AcQueue::draw_backoff(sim::RandomSource& rng) {
  countdown.backoff = static_cast<int>(rng.uniform_int(0, cw_));
  backoff_pending = true;
}

double AcQueue::mean_length(SimTime now) const {
  const SimTime span = now - stats_start_;
  if (span <= 0) return static_cast<double>(frames_.size());
  const double integral =
      length_integral_ + static_cast<double>(frames_.size()) * static_cast<double>(now - last_change_);
  return integral / static_cast<double>(span);
}

void AcQueue::reset_length_stats(SimTime now) {
  stats_start_ = now;
  last_change_ = now;
  length_integral_ = 0.0;
}

}  // namespace edcafair::mac

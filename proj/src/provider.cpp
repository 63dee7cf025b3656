#include "saarthi/provider.hpp"

#include <algorithm>

namespace saarthi {

ClaimResult claim_idle(std::span<InstanceState* const> instances,
                       int claim_retries) {
  for (int attempt = 0; attempt <= claim_retries; ++attempt) {
    // Stage 1: snapshot the idle set, least-loaded first, ties by id.
    std::vector<InstanceState*> idle;
    for (InstanceState* inst : instances) {
      if (inst && is_idle(*inst)) idle.push_back(inst);
    }
    if (idle.empty()) break;
    std::sort(idle.begin(), idle.end(),
              [](const InstanceState* a, const InstanceState* b) {
                int ca = a->active_connections();
                int cb = b->active_connections();
                if (ca != cb) return ca < cb;
                return a->id() < b->id();
              });
    // Stage 2: optimistic claim.
    for (InstanceState* inst : idle) {
      if (inst->try_claim()) {
        return ClaimResult{ClaimOutcome::Claimed, inst, -1};
      }
    }
    // Every CAS lost a race; rescan with a fresh idle set.
  }
  return ClaimResult{ClaimOutcome::NotClaimed, nullptr, -1};
}

ClaimResult RetryQueue::enqueue(std::uint64_t request_id, SimTime now) {
  if (static_cast<int>(entries_.size()) >= capacity_) {
    return ClaimResult{ClaimOutcome::DroppedQueueFull, nullptr, -1};
  }
  entries_.push_back(Entry{request_id, 0, now});
  return ClaimResult{ClaimOutcome::QueuedAt, nullptr,
                     static_cast<int>(entries_.size())};
}

std::vector<RetryQueue::TickResult> RetryQueue::retry_tick(
    const std::function<ClaimResult()>& try_claim, int max_retries) {
  std::vector<TickResult> out;
  // Serve heads in FIFO order while claims succeed; the first failure
  // blocks the rest of the queue for this tick.
  while (!entries_.empty()) {
    Entry& head = entries_.front();
    ClaimResult r = try_claim();
    if (r.outcome != ClaimOutcome::Claimed) break;
    out.push_back(TickResult{head.request_id, r});
    entries_.pop_front();
  }
  // Every waiting entry ages by one tick, so residence is bounded by
  // max_retries * retry_interval even behind a stuck head. Retry counts
  // decrease from front to back, so expired entries sit at the front.
  for (Entry& e : entries_) e.retries++;
  while (!entries_.empty() && entries_.front().retries >= max_retries) {
    out.push_back(TickResult{
        entries_.front().request_id,
        ClaimResult{ClaimOutcome::DroppedRetriesExhausted, nullptr, -1}});
    entries_.pop_front();
  }
  return out;
}

}  // namespace saarthi

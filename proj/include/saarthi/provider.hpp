#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "saarthi/domain.hpp"

namespace saarthi {

struct QueueConfig {
  int capacity = 10;              // K
  double retry_interval_s = 0.010;
  int max_retries = 10;
  int claim_retries = 3;          // optimistic-claim CAS retries
};

enum class ClaimOutcome {
  Claimed,
  NotClaimed,
  QueuedAt,
  DroppedQueueFull,
  DroppedRetriesExhausted,
};

struct ClaimResult {
  ClaimOutcome outcome = ClaimOutcome::NotClaimed;
  InstanceState* instance = nullptr;  // set when Claimed
  int queue_position = -1;            // set when QueuedAt
};

// Idle-first selection with optimistic claim: scan idle instances, try to
// CAS the least-loaded one (ties by id); on contention rescan, up to
// claim_retries times.
ClaimResult claim_idle(std::span<InstanceState* const> instances,
                       int claim_retries);

// Finite FIFO buffer in front of one function version (the K in G/G/c/K).
class RetryQueue {
 public:
  struct Entry {
    std::uint64_t request_id = 0;
    int retries = 0;
    SimTime enqueued_at = 0;
  };

  explicit RetryQueue(int capacity) : capacity_(capacity) {}

  // QueuedAt(position) while length < K, else DroppedQueueFull.
  ClaimResult enqueue(std::uint64_t request_id, SimTime now);

  struct TickResult {
    std::uint64_t request_id = 0;
    ClaimResult result;
  };

  // Heads retry in FIFO order: successful claims dequeue until the first
  // failure, which blocks the rest of the queue this tick. Every entry
  // still waiting then ages by one tick and is dropped once it reaches
  // max_retries, so queue residence never exceeds
  // max_retries * retry_interval even behind a stuck head.
  std::vector<TickResult> retry_tick(
      const std::function<ClaimResult()>& try_claim, int max_retries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int capacity() const { return capacity_; }

 private:
  int capacity_;
  std::deque<Entry> entries_;
};

}  // namespace saarthi

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace saarthi {

// Simulated time in microseconds.
using SimTime = std::int64_t;
constexpr SimTime kUsPerSec = 1'000'000;
constexpr SimTime kUsPerMs = 1'000;

inline SimTime seconds_to_us(double s) {
  return static_cast<SimTime>(std::llround(s * static_cast<double>(kUsPerSec)));
}
inline double us_to_seconds(SimTime t) {
  return static_cast<double>(t) / static_cast<double>(kUsPerSec);
}

// CPU is allocated proportional to memory, AWS-style: 1769 MiB <-> 1 vCPU.
constexpr double kDefaultCpuPerMib = 0.5625;

inline std::int64_t cpu_from_mem(std::int64_t mem_mib,
                                 double cpu_per_mib = kDefaultCpuPerMib) {
  return static_cast<std::int64_t>(
      std::ceil(static_cast<double>(mem_mib) * cpu_per_mib));
}

// Round v up to the next multiple of step.
inline std::int64_t quantize_up(std::int64_t v, std::int64_t step) {
  if (step <= 0) throw std::invalid_argument("quantize step must be > 0");
  if (v <= 0) return step;
  return ((v + step - 1) / step) * step;
}

// Piecewise-linear curve over integer payloads; flat extrapolation
// outside the knot range.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<std::int64_t, double>> knots);

  double value(std::int64_t x) const;
  bool empty() const { return knots_.empty(); }
  const std::vector<std::pair<std::int64_t, double>>& knots() const {
    return knots_;
  }

 private:
  std::vector<std::pair<std::int64_t, double>> knots_;
};

struct FunctionProfile {
  std::string name;
  PiecewiseLinear mem_req;    // payload -> minimum memory (MiB)
  PiecewiseLinear base_time;  // payload -> seconds at time_ref_mem_mib
  std::int64_t time_ref_mem_mib = 1769;
  double mem_speed_exponent = 0.5;  // time scales as (ref_mem / mem)^exp
  double slo_seconds = 5.0;
  std::int64_t payload_min = 0;
  std::int64_t payload_max = 0;

  std::int64_t clamp_payload(std::int64_t p) const;
  // Minimum memory (MiB) for a successful execution of this payload.
  std::int64_t mem_required(std::int64_t payload) const;
  // Nominal execution time; only meaningful when mem >= mem_required.
  double exec_seconds(std::int64_t payload, std::int64_t mem_mib) const;
  void validate() const;
};

struct FunctionVersion {
  std::string function;
  std::int64_t mem_mib = 0;
  std::int64_t cpu_mc = 0;
  int concurrency_limit = 1;  // M_p
  double keep_alive_s = 300.0;

  // (function, mem, cpu) identifies a version; keep_alive is policy.
  std::string id() const;
  bool same_config(const FunctionVersion& o) const {
    return function == o.function && mem_mib == o.mem_mib && cpu_mc == o.cpu_mc;
  }
};

struct ResourcePrediction {
  std::int64_t mem_mib = 0;
  std::int64_t cpu_mc = 0;
  bool cached = false;
};

bool can_serve(const FunctionVersion& version, const ResourcePrediction& pred);

enum class InstancePhase { ColdStarting, Ready, Failed };
enum class FailureReason { OomKilled, CrashLoopBackOff };

// One running replica. The active-connection counter supports an atomic
// claim so the same type backs both the event loop and the race harness.
class InstanceState {
 public:
  InstanceState(std::string id, FunctionVersion version)
      : id_(std::move(id)), version_(std::move(version)) {}

  InstanceState(const InstanceState&) = delete;
  InstanceState& operator=(const InstanceState&) = delete;

  const std::string& id() const { return id_; }
  const FunctionVersion& version() const { return version_; }

  int active_connections() const {
    return active_.load(std::memory_order_acquire);
  }
  InstancePhase phase() const { return phase_; }
  FailureReason failure_reason() const { return failure_reason_; }
  bool draining() const { return draining_; }

  SimTime ready_at = -1;
  SimTime last_used = 0;
  // Sum of the true CPU demand of requests currently executing here.
  std::int64_t active_cpu_demand_mc = 0;
  // Monotonic epoch; bumped on failure so stale completion events can be
  // recognised and dropped.
  std::uint64_t epoch = 0;

  // Single CAS attempt: succeeds iff Ready, not draining and a slot is free.
  bool try_claim() {
    if (phase_ != InstancePhase::Ready || draining_) return false;
    int cur = active_.load(std::memory_order_acquire);
    while (cur < version_.concurrency_limit) {
      if (active_.compare_exchange_weak(cur, cur + 1,
                                        std::memory_order_acq_rel)) {
        return true;
      }
    }
    return false;
  }

  void release(SimTime now) {
    int prev = active_.fetch_sub(1, std::memory_order_acq_rel);
    if (prev <= 0) {
      active_.fetch_add(1, std::memory_order_acq_rel);
      throw std::logic_error("release on instance with no active connections");
    }
    last_used = now;
  }

  void mark_ready(SimTime now) {
    phase_ = InstancePhase::Ready;
    ready_at = now;
    last_used = now;
  }
  void mark_failed(FailureReason r) {
    phase_ = InstancePhase::Failed;
    failure_reason_ = r;
    epoch++;
    active_.store(0, std::memory_order_release);
    active_cpu_demand_mc = 0;
  }
  void set_draining(bool d) { draining_ = d; }

 private:
  std::string id_;
  FunctionVersion version_;
  std::atomic<int> active_{0};
  InstancePhase phase_ = InstancePhase::ColdStarting;
  FailureReason failure_reason_ = FailureReason::OomKilled;
  bool draining_ = false;
};

// idle(p) <=> Ready and C_p < M_p.
bool is_idle(const InstanceState& inst);

struct ClusterCapacity {
  std::int64_t total_cpu_mc = 68000;    // 68 vCPU
  std::int64_t total_mem_mib = 294912;  // 288 GiB
};

enum class RequestState {
  Arrived,
  Predicted,
  Routed,
  Queued,
  Executing,
  Succeeded,
  FailedOom,
  DroppedQueueFull,
  DroppedRetriesExhausted,
};

bool is_terminal(RequestState s);
const char* to_string(RequestState s);
const char* to_string(InstancePhase p);
const char* to_string(FailureReason r);

struct Request {
  std::uint64_t id = 0;
  std::string function;
  std::int64_t payload = 0;
  SimTime arrival = 0;
  double deadline_slo_s = 0.0;

  RequestState state = RequestState::Arrived;
  ResourcePrediction pred{};
  SimTime predicted_at = -1;
  SimTime routed_at = -1;
  SimTime queued_at = -1;
  SimTime exec_start = -1;
  SimTime finished_at = -1;
  std::int64_t billed_ms = -1;
  int queue_retries = 0;
  std::string instance_id;
  std::int64_t exec_mem_mib = 0;  // memory of the version that executed it
};

}  // namespace saarthi

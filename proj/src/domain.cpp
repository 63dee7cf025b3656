#include "saarthi/domain.hpp"

#include <algorithm>

namespace saarthi {

PiecewiseLinear::PiecewiseLinear(
    std::vector<std::pair<std::int64_t, double>> knots)
    : knots_(std::move(knots)) {
  if (knots_.empty()) throw std::invalid_argument("curve needs >= 1 knot");
  std::sort(knots_.begin(), knots_.end());
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i].first == knots_[i - 1].first)
      throw std::invalid_argument("duplicate curve knot x");
  }
}

double PiecewiseLinear::value(std::int64_t x) const {
  if (knots_.empty()) throw std::logic_error("empty curve");
  if (x <= knots_.front().first) return knots_.front().second;
  if (x >= knots_.back().first) return knots_.back().second;
  auto hi = std::upper_bound(
      knots_.begin(), knots_.end(), x,
      [](std::int64_t v, const auto& k) { return v < k.first; });
  auto lo = hi - 1;
  double t = static_cast<double>(x - lo->first) /
             static_cast<double>(hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

std::int64_t FunctionProfile::clamp_payload(std::int64_t p) const {
  return std::clamp(p, payload_min, payload_max);
}

std::int64_t FunctionProfile::mem_required(std::int64_t payload) const {
  return static_cast<std::int64_t>(std::ceil(mem_req.value(payload)));
}

double FunctionProfile::exec_seconds(std::int64_t payload,
                                     std::int64_t mem_mib) const {
  double base = base_time.value(payload);
  double ratio = static_cast<double>(time_ref_mem_mib) /
                 static_cast<double>(mem_mib);
  return base * std::pow(ratio, mem_speed_exponent);
}

void FunctionProfile::validate() const {
  if (name.empty()) throw std::invalid_argument("profile name empty");
  if (slo_seconds <= 0) throw std::invalid_argument("slo_seconds must be > 0");
  if (payload_min > payload_max)
    throw std::invalid_argument("empty payload domain");
  if (mem_req.empty() || base_time.empty())
    throw std::invalid_argument("profile curves missing");
  if (mem_speed_exponent < 0)
    throw std::invalid_argument("mem_speed_exponent must be >= 0");
  // mem_req must be non-decreasing in payload.
  const auto& ks = mem_req.knots();
  for (size_t i = 1; i < ks.size(); ++i) {
    if (ks[i].second < ks[i - 1].second)
      throw std::invalid_argument("mem_req curve must be non-decreasing");
  }
  for (const auto& [x, y] : ks) {
    if (y <= 0) throw std::invalid_argument("mem_req values must be > 0");
  }
  for (const auto& [x, y] : base_time.knots()) {
    if (y <= 0) throw std::invalid_argument("base_time values must be > 0");
  }
}

std::string FunctionVersion::id() const {
  return function + "-m" + std::to_string(mem_mib) + "c" +
         std::to_string(cpu_mc);
}

bool can_serve(const FunctionVersion& version, const ResourcePrediction& pred) {
  return version.mem_mib >= pred.mem_mib && version.cpu_mc >= pred.cpu_mc;
}

bool is_idle(const InstanceState& inst) {
  return inst.phase() == InstancePhase::Ready && !inst.draining() &&
         inst.active_connections() < inst.version().concurrency_limit;
}

bool is_terminal(RequestState s) {
  switch (s) {
    case RequestState::Succeeded:
    case RequestState::FailedOom:
    case RequestState::DroppedQueueFull:
    case RequestState::DroppedRetriesExhausted:
      return true;
    default:
      return false;
  }
}

const char* to_string(RequestState s) {
  switch (s) {
    case RequestState::Arrived: return "arrived";
    case RequestState::Predicted: return "predicted";
    case RequestState::Routed: return "routed";
    case RequestState::Queued: return "queued";
    case RequestState::Executing: return "executing";
    case RequestState::Succeeded: return "succeeded";
    case RequestState::FailedOom: return "failed_oom";
    case RequestState::DroppedQueueFull: return "dropped_queue_full";
    case RequestState::DroppedRetriesExhausted:
      return "dropped_retries_exhausted";
  }
  return "?";
}

const char* to_string(InstancePhase p) {
  switch (p) {
    case InstancePhase::ColdStarting: return "cold_starting";
    case InstancePhase::Ready: return "ready";
    case InstancePhase::Failed: return "failed";
  }
  return "?";
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::OomKilled: return "OOMKilled";
    case FailureReason::CrashLoopBackOff: return "CrashLoopBackOff";
  }
  return "?";
}

}  // namespace saarthi

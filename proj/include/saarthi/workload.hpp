#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "saarthi/domain.hpp"

namespace saarthi {

struct SyntheticSpec {
  double rate_lambda = 1.0;    // requests per second, Poisson arrivals
  double payload_mu = 0.0;     // log-normal parameters of payload size
  double payload_sigma = 0.0;
  double duration_s = 60.0;
  std::uint64_t seed = 1;
};

struct TraceRecord {
  std::int64_t timestamp_ms = 0;  // offset from experiment start
  std::string function;
  std::int64_t payload = 0;
};

// Synthetic stream: exponential inter-arrival gaps, log-normal payloads
// clamped to the profile's payload domain. Deterministic for a fixed seed.
std::vector<Request> generate(const SyntheticSpec& spec,
                              const FunctionProfile& profile);

// CSV trace: header `timestamp_ms,function,payload`, UTF-8, LF endings.
// Arrival times are timestamp * clock_scale. Malformed rows raise with the
// line number; unknown functions raise naming the function.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<Request> load_trace(const std::string& path, double clock_scale,
                                const std::vector<FunctionProfile>& profiles);
std::vector<Request> trace_to_requests(
    const std::vector<TraceRecord>& records, double clock_scale,
    const std::vector<FunctionProfile>& profiles);

}  // namespace saarthi

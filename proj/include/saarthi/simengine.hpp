#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saarthi/domain.hpp"
#include "saarthi/eventlog.hpp"
#include "saarthi/gateway.hpp"
#include "saarthi/metrics.hpp"
#include "saarthi/optimizer.hpp"
#include "saarthi/predictor.hpp"
#include "saarthi/provider.hpp"
#include "saarthi/redundancy.hpp"
#include "saarthi/workload.hpp"

namespace saarthi {

enum class Variant { BaselineStatic, Mvq, Mevq, Moevq };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

struct LatencyConfig {
  double cold_start_min_s = 2.0;
  double cold_start_max_s = 6.0;
  double apply_action_s = 0.2;  // scaling decisions on the critical path
  double oom_fraction = 0.5;    // OOM kills after this fraction of nominal
};

struct EngineConfig {
  ClusterCapacity cluster;
  BalancerConfig balancer;
  QueueConfig queue;
  OptimizerConfig optimizer;
  RedundancyConfig redundancy;
  PredictorConfig predictor;
  PricingConfig pricing;
  LatencyConfig latency;
  int concurrency_limit = 10;
  double keep_alive_s = 300.0;
  std::int64_t max_instances_per_version = 100;
  std::int64_t baseline_mem_mib = 1769;  // static AWS-style default
  double function_timeout_s = 600.0;
  bool dump_plans = false;
};

struct RunResult {
  EventLog log;
  MetricsReport report;  // recomputed from the log
  Cost streaming_cost;   // accumulated during the run, for cross-checks
  std::vector<std::string> plan_dumps;  // one document per optimizer cycle
};

// The function execution model: OOM below the memory floor, otherwise
// nominal time stretched by the processor-sharing factor sampled at
// admission. concurrent_cpu_demand_mc includes this request's demand.
struct ExecOutcome {
  double duration_s = 0.0;
  bool oom = false;
  double sharing_factor = 1.0;
};
ExecOutcome execute_model(const FunctionProfile& profile, std::int64_t payload,
                          const FunctionVersion& version,
                          std::int64_t concurrent_cpu_demand_mc,
                          const LatencyConfig& latency, double timeout_s);

// Deterministic single-run entry point: identical (config, workload, seed)
// produce byte-identical event logs.
RunResult run(const EngineConfig& cfg,
              const std::vector<FunctionProfile>& profiles,
              const std::vector<Request>& workload, Variant variant,
              std::uint64_t seed);

}  // namespace saarthi

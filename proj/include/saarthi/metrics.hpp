#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "saarthi/eventlog.hpp"

namespace saarthi {

struct PricingConfig {
  double price_per_gb_s = 0.0000166667;  // GB-second rate
  double price_per_request = 0.0000002;  // per-invocation fee
};

// Exact fixed-point cost: the duration component is kept as an integer
// numerator (mem_mib * billed_ms * rate in pico-currency) over the constant
// denominator 1024 * 1000, so recomputations compare without tolerance.
struct Cost {
  using Num = __int128;
  Num duration_num = 0;
  std::int64_t billed_requests = 0;

  static std::int64_t rate_pico(double dollars) {
    return static_cast<std::int64_t>(std::llround(dollars * 1e12));
  }
  void add_execution(std::int64_t mem_mib, std::int64_t billed_ms,
                     std::int64_t gb_s_rate_pico) {
    duration_num += static_cast<Num>(mem_mib) * billed_ms * gb_s_rate_pico;
    billed_requests += 1;
  }
  double dollars(std::int64_t per_request_pico) const {
    return static_cast<double>(duration_num) / (1024.0 * 1000.0 * 1e12) +
           static_cast<double>(billed_requests) *
               static_cast<double>(per_request_pico) / 1e12;
  }
  bool operator==(const Cost& o) const {
    return duration_num == o.duration_num &&
           billed_requests == o.billed_requests;
  }
};

struct FunctionMetrics {
  std::string function;
  double slo_seconds = 0.0;
  std::int64_t total_requests = 0;
  std::int64_t succeeded = 0;
  std::int64_t failed_oom = 0;
  std::int64_t dropped_queue_full = 0;
  std::int64_t dropped_retries = 0;
  std::int64_t sla_e2e_met = 0;   // successful, end-to-end latency <= SLO
  std::int64_t sla_exec_met = 0;  // successful, execution time <= SLO
  Cost cost;

  double success_rate() const {
    return total_requests ? static_cast<double>(succeeded) / total_requests
                          : 0.0;
  }
  double sla_rate_e2e() const {
    return succeeded ? static_cast<double>(sla_e2e_met) / succeeded : 0.0;
  }
  double sla_rate_exec() const {
    return succeeded ? static_cast<double>(sla_exec_met) / succeeded : 0.0;
  }
};

struct MetricsReport {
  std::string variant;
  std::uint64_t seed = 0;
  PricingConfig pricing;
  std::map<std::string, FunctionMetrics> per_function;
  FunctionMetrics aggregate;  // function = "__all__"
  std::int64_t unique_configurations = 0;
  std::int64_t total_unique_instances = 0;
  std::int64_t scale_events = 0;
  double overall_score = 0.0;  // filled by score()

  double total_cost_dollars() const {
    return aggregate.cost.dollars(Cost::rate_pico(pricing.price_per_request));
  }
};

// Recompute a full report from a log; pricing overrides the pricing stored
// in the run header when given.
MetricsReport replay_metrics(const std::vector<LogRecord>& log,
                             const PricingConfig* pricing_override = nullptr);

// Fig.-7-style normalised weighted score across a comparison set. Weights
// must sum to 1; a degenerate min-max range scores 1 for every report.
void score(std::vector<MetricsReport>& reports, double w_sla, double w_cost,
           double w_success);

std::string report_csv_header();
std::string report_csv_rows(const MetricsReport& report);
std::string comparison_table(const std::vector<MetricsReport>& reports);

}  // namespace saarthi

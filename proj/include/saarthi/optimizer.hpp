#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "saarthi/domain.hpp"

namespace saarthi {

struct OptimizerConfig {
  double alpha = 1.0;  // instance-cost weight
  double beta = 1.0;   // unserved-demand penalty weight
  double gamma = 1.0;  // served-utility weight
  double interval_s = 60.0;
  double solve_latency_s = 1.45;
  double kappa_per_minute = 10.0;  // per-instance request throughput
  double budget_s = 1.0;           // solver wall-clock budget
  bool cold_start_term = false;    // optional additive cold-start penalty
  double cs_penalty = 0.0;
  // Objective coefficients are scaled to integers by this factor so the
  // solver and its oracle compare exactly.
  double coeff_scale = 1e6;
};

// One deployable version in the model, with integer objective coefficient
// (weight alpha already folded in).
struct ModelVersion {
  FunctionVersion version;
  std::int64_t cost_coeff = 0;  // per instance per interval
  std::int64_t cpu_mc = 0;
  std::int64_t mem_mib = 0;
  std::int64_t kappa = 0;       // requests servable per instance per interval
  std::int64_t lower = 0;       // L_fv (no scale-to-zero)
  std::int64_t upper = 0;
  std::int64_t live_count = 0;  // for the optional cold-start term
};

// A demand class: requests of one quantized predicted configuration.
struct ModelClass {
  std::string id;
  std::string function;
  ResourcePrediction required;
  std::int64_t rep_payload = 0;
  std::int64_t demand = 0;
  std::int64_t penalty_coeff = 0;  // beta folded in
  std::int64_t utility_coeff = 0;  // gamma folded in
};

struct IlpModel {
  std::vector<ModelVersion> versions;
  std::vector<ModelClass> classes;
  // compat[r][v] <=> can_serve(versions[v], classes[r].required)
  std::vector<std::vector<char>> compat;
  ClusterCapacity capacity;
  std::int64_t cs_penalty_coeff = 0;  // 0 disables the cold-start term
};

enum class SolveStatus { Optimal, FeasibleWithGap, Infeasible };

struct OptimizerPlan {
  SolveStatus status = SolveStatus::Infeasible;
  std::string infeasible_reason;
  std::vector<std::int64_t> x;                // per version
  std::vector<std::vector<std::int64_t>> y;   // [class][version]
  std::int64_t objective = 0;
  std::int64_t cost_term = 0;
  std::int64_t penalty_term = 0;
  std::int64_t utility_term = 0;
  std::int64_t gap = 0;  // objective - best proven bound, when not Optimal
};

struct ScaleAction {
  FunctionVersion version;
  std::int64_t from = 0;
  std::int64_t to = 0;
};

// Inputs build_model digests: what the engine observed last interval.
struct DemandSnapshot {
  struct ClassObservation {
    std::string function;
    ResourcePrediction required;
    std::int64_t demand = 0;
    std::int64_t rep_payload = 0;  // representative payload for costing
  };
  struct LiveVersion {
    FunctionVersion version;
    std::int64_t count = 0;
    std::int64_t busy = 0;
    bool served_last_interval = false;
  };
  std::vector<ClassObservation> classes;
  std::vector<LiveVersion> live;
  ClusterCapacity capacity;
};

struct PricingView {
  double price_per_gb_s = 0.0000166667;
  double price_per_request = 0.0000002;
};

IlpModel build_model(const DemandSnapshot& snapshot,
                     const std::vector<FunctionProfile>& profiles,
                     const PricingView& pricing, const OptimizerConfig& cfg,
                     int concurrency_limit, double keep_alive_s,
                     std::int64_t max_instances_per_version);

// Exact branch-and-bound over x with an optimal transportation
// sub-solve for y. Deterministic for a given model; exceeding the budget
// returns the incumbent as FeasibleWithGap.
OptimizerPlan solve(const IlpModel& model, double budget_s);

// Independent constraint check (does not trust the solver).
bool validate_plan(const IlpModel& model, const OptimizerPlan& plan,
                   std::string* why = nullptr);

// Scale-up/down actions against live counts. Never scales a version below
// its busy-instance count; versions in `suppressed_down` keep their count.
std::vector<ScaleAction> reconcile(
    const IlpModel& model, const OptimizerPlan& plan,
    const std::vector<DemandSnapshot::LiveVersion>& live,
    const std::vector<std::string>& suppressed_down);

}  // namespace saarthi

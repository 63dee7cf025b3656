#pragma once

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "saarthi/domain.hpp"

namespace saarthi {

enum class ExploreMode { Window, Bernoulli };

struct BalancerConfig {
  double tolerance = 0.20;  // +/- window around S_best in Window mode
  ExploreMode explore_mode = ExploreMode::Bernoulli;
  double explore_p = 0.20;  // Bernoulli cold-start probability
  double balancer_latency_s = 0.040;
  int max_versions = 50;  // distinct deployments cluster-wide
};

// Surplus of a version over the prediction; lower is better, 0 is exact.
// Caller must ensure can_serve(version, pred).
double version_score(const FunctionVersion& version,
                     const ResourcePrediction& pred);

enum class RouteKind { RouteExisting, ColdStartNew, Enqueue };

struct RoutingDecision {
  RouteKind kind = RouteKind::Enqueue;
  FunctionVersion version;  // target (existing or to-be-created)
  double score_best = std::numeric_limits<double>::quiet_NaN();
  double score_cs = std::numeric_limits<double>::quiet_NaN();
  bool explored = false;  // cold start taken on the explore branch
};

// One live version of the request's function, with its idle-instance count.
struct VersionView {
  FunctionVersion version;
  int idle_instances = 0;
};

// Adaptive request balancer decision for one request.
//   exact: the version whose configuration equals the prediction
//   candidates: live versions of this function
//   exact_deployed: whether `exact` already exists in the cluster
//   total_live_versions: distinct deployments cluster-wide (max_versions cap)
RoutingDecision route(const ResourcePrediction& pred,
                      const FunctionVersion& exact,
                      std::span<const VersionView> candidates,
                      bool exact_deployed, int total_live_versions,
                      std::mt19937_64& rng, const BalancerConfig& cfg);

}  // namespace saarthi

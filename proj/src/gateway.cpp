#include "saarthi/gateway.hpp"

#include <algorithm>

namespace saarthi {

double version_score(const FunctionVersion& version,
                     const ResourcePrediction& pred) {
  double mem_surplus =
      static_cast<double>(version.mem_mib - pred.mem_mib) /
      static_cast<double>(pred.mem_mib);
  double cpu_surplus =
      static_cast<double>(version.cpu_mc - pred.cpu_mc) /
      static_cast<double>(pred.cpu_mc);
  return mem_surplus + cpu_surplus;
}

RoutingDecision route(const ResourcePrediction& pred,
                      const FunctionVersion& exact,
                      std::span<const VersionView> candidates,
                      bool exact_deployed, int total_live_versions,
                      std::mt19937_64& rng, const BalancerConfig& cfg) {
  RoutingDecision d;

  // Branch (a): an idle instance of the exact configuration.
  for (const auto& c : candidates) {
    if (c.idle_instances > 0 && c.version.same_config(exact)) {
      d.kind = RouteKind::RouteExisting;
      d.version = c.version;
      d.score_best = 0.0;
      return d;
    }
  }

  // Branch (b): best-scored servable version with an idle instance.
  const VersionView* best = nullptr;
  double best_score = 0.0;
  for (const auto& c : candidates) {
    if (c.idle_instances <= 0 || !can_serve(c.version, pred)) continue;
    double s = version_score(c.version, pred);
    if (!best || s < best_score ||
        (s == best_score &&
         (c.version.mem_mib < best->version.mem_mib ||
          (c.version.mem_mib == best->version.mem_mib &&
           c.version.id() < best->version.id())))) {
      best = &c;
      best_score = s;
    }
  }

  if (best) {
    d.score_best = best_score;
    bool explore = false;
    if (cfg.explore_mode == ExploreMode::Window) {
      // S_CS ~ U(S_best(1-tau), S_best(1+tau)); cold start when
      // S_CS <= S_best. At S_best = 0 the window is degenerate: exploit,
      // since a zero-score version is exactly the predicted configuration.
      if (best_score > 0.0) {
        std::uniform_real_distribution<double> window(
            best_score * (1.0 - cfg.tolerance),
            best_score * (1.0 + cfg.tolerance));
        d.score_cs = window(rng);
        explore = d.score_cs <= best_score;
      }
    } else {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      explore = coin(rng) < cfg.explore_p;
    }
    if (explore && (total_live_versions < cfg.max_versions || exact_deployed)) {
      d.kind = RouteKind::ColdStartNew;
      d.version = exact;
      d.explored = true;
    } else {
      d.kind = RouteKind::RouteExisting;
      d.version = best->version;
    }
    return d;
  }

  // Branch (c): nothing servable is idle. Cold start the exact version if
  // the deployment cap allows it, otherwise degrade to the queue.
  if (exact_deployed || total_live_versions < cfg.max_versions) {
    d.kind = RouteKind::ColdStartNew;
    d.version = exact;
    return d;
  }
  d.kind = RouteKind::Enqueue;
  d.version = exact;
  return d;
}

}  // namespace saarthi

#include "saarthi/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace saarthi {

namespace {

std::int64_t scale_coeff(double v, double scale) {
  return static_cast<std::int64_t>(std::llround(v * scale));
}

// Per-request execution cost of a class at its own configuration: the
// default anchor for penalty/utility coefficients.
double class_exec_cost(const DemandSnapshot::ClassObservation& c,
                       const std::vector<FunctionProfile>& profiles,
                       const PricingView& pricing) {
  const FunctionProfile* profile = nullptr;
  for (const auto& p : profiles)
    if (p.name == c.function) profile = &p;
  double exec_s = 1.0;
  if (profile && c.required.mem_mib >= profile->mem_required(c.rep_payload))
    exec_s = profile->exec_seconds(c.rep_payload, c.required.mem_mib);
  double gb = static_cast<double>(c.required.mem_mib) / 1024.0;
  return gb * exec_s * pricing.price_per_gb_s + pricing.price_per_request;
}

}  // namespace

IlpModel build_model(const DemandSnapshot& snapshot,
                     const std::vector<FunctionProfile>& profiles,
                     const PricingView& pricing, const OptimizerConfig& cfg,
                     int concurrency_limit, double keep_alive_s,
                     std::int64_t max_instances_per_version) {
  IlpModel model;
  model.capacity = snapshot.capacity;
  if (cfg.cold_start_term)
    model.cs_penalty_coeff = scale_coeff(cfg.cs_penalty, cfg.coeff_scale);

  std::int64_t kappa = std::max<std::int64_t>(
      1, std::llround(cfg.kappa_per_minute * cfg.interval_s / 60.0));
  // Keep-alive billing for one interval: mem_GiB * interval * GB-s rate.
  auto instance_cost = [&](std::int64_t mem_mib) {
    return (static_cast<double>(mem_mib) / 1024.0) * cfg.interval_s *
           pricing.price_per_gb_s;
  };

  auto add_version = [&](const FunctionVersion& v, std::int64_t live_count,
                         bool served) {
    for (auto& mv : model.versions) {
      if (mv.version.same_config(v)) {
        mv.live_count += live_count;
        if (served) mv.lower = std::max<std::int64_t>(mv.lower, 1);
        return;
      }
    }
    ModelVersion mv;
    mv.version = v;
    mv.version.concurrency_limit = concurrency_limit;
    mv.version.keep_alive_s = keep_alive_s;
    mv.cost_coeff =
        scale_coeff(cfg.alpha * instance_cost(v.mem_mib), cfg.coeff_scale);
    mv.cpu_mc = v.cpu_mc;
    mv.mem_mib = v.mem_mib;
    mv.kappa = kappa;
    mv.lower = served ? 1 : 0;
    mv.live_count = live_count;
    model.versions.push_back(std::move(mv));
  };

  for (const auto& lv : snapshot.live)
    add_version(lv.version, lv.count, lv.served_last_interval);

  for (const auto& obs : snapshot.classes) {
    FunctionVersion exact;
    exact.function = obs.function;
    exact.mem_mib = obs.required.mem_mib;
    exact.cpu_mc = obs.required.cpu_mc;
    add_version(exact, 0, false);

    ModelClass cls;
    cls.function = obs.function;
    cls.required = obs.required;
    cls.rep_payload = obs.rep_payload;
    cls.demand = obs.demand;
    cls.id = obs.function + "/m" + std::to_string(obs.required.mem_mib);
    double exec_cost = class_exec_cost(obs, profiles, pricing);
    cls.penalty_coeff =
        scale_coeff(cfg.beta * exec_cost * 2.0, cfg.coeff_scale);
    cls.utility_coeff = scale_coeff(cfg.gamma * exec_cost, cfg.coeff_scale);
    model.classes.push_back(std::move(cls));
  }

  // Upper bounds: capacity, per-version instance cap, and enough headroom
  // to serve all compatible demand.
  model.compat.assign(model.classes.size(),
                      std::vector<char>(model.versions.size(), 0));
  for (size_t r = 0; r < model.classes.size(); ++r)
    for (size_t v = 0; v < model.versions.size(); ++v)
      model.compat[r][v] =
          can_serve(model.versions[v].version, model.classes[r].required);

  for (size_t v = 0; v < model.versions.size(); ++v) {
    auto& mv = model.versions[v];
    std::int64_t cap_cpu =
        mv.cpu_mc > 0 ? model.capacity.total_cpu_mc / mv.cpu_mc
                      : max_instances_per_version;
    std::int64_t cap_mem =
        mv.mem_mib > 0 ? model.capacity.total_mem_mib / mv.mem_mib
                       : max_instances_per_version;
    std::int64_t compatible_demand = 0;
    for (size_t r = 0; r < model.classes.size(); ++r)
      if (model.compat[r][v]) compatible_demand += model.classes[r].demand;
    std::int64_t useful =
        mv.lower + (compatible_demand + mv.kappa - 1) / mv.kappa;
    mv.upper = std::max(mv.lower,
                        std::min({cap_cpu, cap_mem, max_instances_per_version,
                                  useful}));
  }
  return model;
}

namespace {

// Max-weight served vector for fixed per-version capacities: greedy by
// class weight with augmenting paths on the bipartite residual graph.
// Weights are non-negative, so greedy over this flow polytope is exact.
struct TransportResult {
  std::vector<std::vector<std::int64_t>> y;
  std::vector<std::int64_t> served;
};

TransportResult solve_transport(const IlpModel& model,
                                const std::vector<std::int64_t>& caps) {
  const size_t nr = model.classes.size();
  const size_t nv = model.versions.size();
  TransportResult res;
  res.y.assign(nr, std::vector<std::int64_t>(nv, 0));
  res.served.assign(nr, 0);
  std::vector<std::int64_t> used(nv, 0);

  std::vector<size_t> order(nr);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    std::int64_t wa = model.classes[a].penalty_coeff +
                      model.classes[a].utility_coeff;
    std::int64_t wb = model.classes[b].penalty_coeff +
                      model.classes[b].utility_coeff;
    return wa > wb;
  });

  for (size_t r : order) {
    std::int64_t want = model.classes[r].demand;
    std::int64_t w = model.classes[r].penalty_coeff +
                     model.classes[r].utility_coeff;
    if (w <= 0) continue;  // serving it cannot improve the objective
    while (res.served[r] < want) {
      // BFS for an augmenting path from class r to a version with spare
      // capacity; versions and classes alternate on the path.
      std::vector<int> ver_parent_class(nv, -2);   // -2 unvisited
      std::vector<int> class_parent_ver(nr, -2);
      std::vector<size_t> frontier;
      class_parent_ver[r] = -1;
      std::vector<size_t> class_frontier{r};
      int found_ver = -1;
      while (found_ver < 0 && !class_frontier.empty()) {
        frontier.clear();
        for (size_t cr : class_frontier) {
          for (size_t v = 0; v < nv && found_ver < 0; ++v) {
            if (!model.compat[cr][v] || ver_parent_class[v] != -2) continue;
            ver_parent_class[v] = static_cast<int>(cr);
            if (used[v] < caps[v]) {
              found_ver = static_cast<int>(v);
              break;
            }
            frontier.push_back(v);
          }
          if (found_ver >= 0) break;
        }
        if (found_ver >= 0) break;
        class_frontier.clear();
        for (size_t v : frontier) {
          for (size_t cr = 0; cr < nr; ++cr) {
            if (class_parent_ver[cr] != -2 || res.y[cr][v] <= 0) continue;
            class_parent_ver[cr] = static_cast<int>(v);
            class_frontier.push_back(cr);
          }
        }
      }
      if (found_ver < 0) break;  // class r is saturated by Hall's condition

      // Bottleneck along the alternating path.
      std::int64_t bottleneck = want - res.served[r];
      {
        int v = found_ver;
        bottleneck = std::min(bottleneck, caps[v] - used[v]);
        int cr = ver_parent_class[v];
        while (class_parent_ver[cr] != -1) {
          int pv = class_parent_ver[cr];
          bottleneck = std::min(bottleneck, res.y[cr][pv]);
          cr = ver_parent_class[pv];
        }
      }
      // Apply: push along the path, rerouting intermediate classes.
      {
        int v = found_ver;
        used[v] += bottleneck;
        int cr = ver_parent_class[v];
        res.y[cr][v] += bottleneck;
        while (class_parent_ver[cr] != -1) {
          int pv = class_parent_ver[cr];
          res.y[cr][pv] -= bottleneck;
          v = pv;
          cr = ver_parent_class[v];
          res.y[cr][v] += bottleneck;
        }
        res.served[r] += bottleneck;
      }
    }
  }
  return res;
}

struct ObjectiveParts {
  std::int64_t total = 0;
  std::int64_t cost = 0;
  std::int64_t penalty = 0;
  std::int64_t utility = 0;
};

ObjectiveParts evaluate(const IlpModel& model,
                        const std::vector<std::int64_t>& x,
                        const std::vector<std::int64_t>& served) {
  ObjectiveParts p;
  for (size_t v = 0; v < model.versions.size(); ++v) {
    p.cost += x[v] * model.versions[v].cost_coeff;
    if (model.cs_penalty_coeff > 0) {
      std::int64_t extra = x[v] - model.versions[v].live_count;
      if (extra > 0) p.cost += extra * model.cs_penalty_coeff;
    }
  }
  for (size_t r = 0; r < model.classes.size(); ++r) {
    p.penalty += (model.classes[r].demand - served[r]) *
                 model.classes[r].penalty_coeff;
    p.utility += served[r] * model.classes[r].utility_coeff;
  }
  p.total = p.cost + p.penalty - p.utility;
  return p;
}

}  // namespace

OptimizerPlan solve(const IlpModel& model, double budget_s) {
  OptimizerPlan plan;
  const size_t nv = model.versions.size();
  const size_t nr = model.classes.size();

  std::int64_t lb_cpu = 0, lb_mem = 0;
  for (const auto& mv : model.versions) {
    lb_cpu += mv.lower * mv.cpu_mc;
    lb_mem += mv.lower * mv.mem_mib;
  }
  if (lb_cpu > model.capacity.total_cpu_mc) {
    plan.status = SolveStatus::Infeasible;
    plan.infeasible_reason = "lower bounds exceed cluster CPU capacity";
    return plan;
  }
  if (lb_mem > model.capacity.total_mem_mib) {
    plan.status = SolveStatus::Infeasible;
    plan.infeasible_reason = "lower bounds exceed cluster memory capacity";
    return plan;
  }

  // Baseline objective with zero served demand; every node's bound assumes
  // the rest of demand could still be served for free.
  std::int64_t base_penalty = 0, max_benefit = 0;
  for (const auto& c : model.classes) {
    base_penalty += c.demand * c.penalty_coeff;
    max_benefit += c.demand * (c.penalty_coeff + c.utility_coeff);
  }
  std::vector<std::int64_t> min_remaining_cost(nv + 1, 0);
  for (size_t v = nv; v-- > 0;) {
    min_remaining_cost[v] = min_remaining_cost[v + 1] +
                            model.versions[v].lower *
                                std::max<std::int64_t>(
                                    0, model.versions[v].cost_coeff);
  }

  std::vector<std::int64_t> x(nv, 0);
  bool have_incumbent = false;
  std::int64_t best_obj = 0;
  std::vector<std::int64_t> best_x;
  TransportResult best_y;
  bool budget_hit = false;
  std::int64_t abandoned_bound = 0;
  bool have_abandoned = false;
  std::uint64_t nodes = 0;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(budget_s);

  auto leaf = [&]() {
    std::vector<std::int64_t> caps(nv);
    for (size_t v = 0; v < nv; ++v) caps[v] = x[v] * model.versions[v].kappa;
    TransportResult t = solve_transport(model, caps);
    ObjectiveParts obj = evaluate(model, x, t.served);
    if (!have_incumbent || obj.total < best_obj) {
      have_incumbent = true;
      best_obj = obj.total;
      best_x = x;
      best_y = std::move(t);
    }
  };

  // DFS over instance counts; prune when even serving all remaining demand
  // for free cannot beat the incumbent.
  auto dfs = [&](auto&& self, size_t idx, std::int64_t cpu, std::int64_t mem,
                 std::int64_t cost) -> void {
    if (budget_hit) return;
    if (++nodes % 1024 == 0 &&
        std::chrono::steady_clock::now() > deadline) {
      budget_hit = true;
    }
    std::int64_t bound =
        cost + min_remaining_cost[idx] + base_penalty - max_benefit;
    if (have_incumbent && bound >= best_obj) return;
    if (budget_hit) {
      abandoned_bound = have_abandoned ? std::min(abandoned_bound, bound)
                                       : bound;
      have_abandoned = true;
      return;
    }
    if (idx == nv) {
      leaf();
      return;
    }
    const auto& mv = model.versions[idx];
    for (std::int64_t k = mv.lower; k <= mv.upper; ++k) {
      std::int64_t ncpu = cpu + k * mv.cpu_mc;
      std::int64_t nmem = mem + k * mv.mem_mib;
      if (ncpu > model.capacity.total_cpu_mc ||
          nmem > model.capacity.total_mem_mib)
        break;
      x[idx] = k;
      self(self, idx + 1, ncpu, nmem, cost + k * mv.cost_coeff);
      x[idx] = mv.lower;
    }
  };
  dfs(dfs, 0, 0, 0, 0);

  if (!have_incumbent) {
    plan.status = SolveStatus::Infeasible;
    plan.infeasible_reason = "no feasible assignment found within budget";
    return plan;
  }
  plan.x = best_x;
  plan.y = best_y.y;
  ObjectiveParts obj = evaluate(model, best_x, best_y.served);
  plan.objective = obj.total;
  plan.cost_term = obj.cost;
  plan.penalty_term = obj.penalty;
  plan.utility_term = obj.utility;
  if (budget_hit && have_abandoned && abandoned_bound < best_obj) {
    plan.status = SolveStatus::FeasibleWithGap;
    plan.gap = best_obj - abandoned_bound;
  } else {
    plan.status = SolveStatus::Optimal;
  }
  (void)nr;
  return plan;
}

bool validate_plan(const IlpModel& model, const OptimizerPlan& plan,
                   std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (plan.status == SolveStatus::Infeasible)
    return fail("plan is infeasible");
  const size_t nv = model.versions.size();
  const size_t nr = model.classes.size();
  if (plan.x.size() != nv || plan.y.size() != nr)
    return fail("plan dimensions do not match model");
  std::int64_t cpu = 0, mem = 0;
  for (size_t v = 0; v < nv; ++v) {
    if (plan.x[v] < model.versions[v].lower)
      return fail("x below lower bound for " + model.versions[v].version.id());
    if (plan.x[v] < 0) return fail("negative instance count");
    cpu += plan.x[v] * model.versions[v].cpu_mc;
    mem += plan.x[v] * model.versions[v].mem_mib;
  }
  if (cpu > model.capacity.total_cpu_mc) return fail("CPU capacity exceeded");
  if (mem > model.capacity.total_mem_mib)
    return fail("memory capacity exceeded");
  std::vector<std::int64_t> col(nv, 0);
  std::vector<std::int64_t> served(nr, 0);
  for (size_t r = 0; r < nr; ++r) {
    if (plan.y[r].size() != nv) return fail("y row dimension mismatch");
    for (size_t v = 0; v < nv; ++v) {
      if (plan.y[r][v] < 0) return fail("negative assignment");
      if (plan.y[r][v] > 0 && !model.compat[r][v])
        return fail("assignment to incompatible version");
      col[v] += plan.y[r][v];
      served[r] += plan.y[r][v];
    }
    if (served[r] > model.classes[r].demand)
      return fail("served exceeds demand for class " + model.classes[r].id);
  }
  for (size_t v = 0; v < nv; ++v) {
    if (col[v] > plan.x[v] * model.versions[v].kappa)
      return fail("throughput capacity exceeded for " +
                  model.versions[v].version.id());
  }
  ObjectiveParts obj = evaluate(model, plan.x, served);
  if (obj.total != plan.objective)
    return fail("objective does not match recomputation");
  return true;
}

std::vector<ScaleAction> reconcile(
    const IlpModel& model, const OptimizerPlan& plan,
    const std::vector<DemandSnapshot::LiveVersion>& live,
    const std::vector<std::string>& suppressed_down) {
  std::vector<ScaleAction> actions;
  if (plan.status == SolveStatus::Infeasible) return actions;
  for (size_t v = 0; v < model.versions.size(); ++v) {
    const auto& mv = model.versions[v];
    std::int64_t current = 0, busy = 0;
    for (const auto& lv : live) {
      if (lv.version.same_config(mv.version)) {
        current = lv.count;
        busy = lv.busy;
        break;
      }
    }
    std::int64_t target = plan.x[v];
    if (target < current) {
      bool suppressed =
          std::find(suppressed_down.begin(), suppressed_down.end(),
                    mv.version.id()) != suppressed_down.end();
      if (suppressed) continue;
      target = std::max(target, busy);  // never remove a busy instance
    }
    if (target != current)
      actions.push_back(ScaleAction{mv.version, current, target});
  }
  return actions;
}

}  // namespace saarthi

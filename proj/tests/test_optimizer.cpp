#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "saarthi/optimizer.hpp"

using namespace saarthi;

namespace {

FunctionVersion ver(std::int64_t mem, std::int64_t cpu,
                    const std::string& fn = "f") {
  FunctionVersion v;
  v.function = fn;
  v.mem_mib = mem;
  v.cpu_mc = cpu;
  v.concurrency_limit = 10;
  return v;
}

ModelVersion mver(std::int64_t mem, std::int64_t cpu, std::int64_t cost,
                  std::int64_t kappa, std::int64_t upper,
                  std::int64_t lower = 0) {
  ModelVersion mv;
  mv.version = ver(mem, cpu);
  mv.cost_coeff = cost;
  mv.cpu_mc = cpu;
  mv.mem_mib = mem;
  mv.kappa = kappa;
  mv.lower = lower;
  mv.upper = upper;
  return mv;
}

ModelClass mclass(const std::string& id, std::int64_t mem, std::int64_t cpu,
                  std::int64_t demand, std::int64_t penalty,
                  std::int64_t utility) {
  ModelClass c;
  c.id = id;
  c.function = "f";
  c.required = ResourcePrediction{mem, cpu, false};
  c.demand = demand;
  c.penalty_coeff = penalty;
  c.utility_coeff = utility;
  return c;
}

void fill_compat(IlpModel& m) {
  m.compat.assign(m.classes.size(),
                  std::vector<char>(m.versions.size(), 0));
  for (size_t r = 0; r < m.classes.size(); ++r)
    for (size_t v = 0; v < m.versions.size(); ++v)
      m.compat[r][v] = can_serve(m.versions[v].version, m.classes[r].required);
}

IlpModel big_capacity_model() {
  IlpModel m;
  m.capacity.total_cpu_mc = 1'000'000;
  m.capacity.total_mem_mib = 1'000'000;
  return m;
}

}  // namespace

TEST_CASE("single-version model: the solver balances cost against penalty") {
  // cost 4 per instance, kappa 10, demand 15, penalty 2, utility 1 per req:
  //   x=1: 4 + 5*2 - 10*1 = 4;  x=2: 8 + 0 - 15 = -7;  x=3: 12 - 15 = -3.
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 4, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 15, 2, 1));
  fill_compat(m);

  auto plan = solve(m, 1.0);
  REQUIRE(plan.status == SolveStatus::Optimal);
  REQUIRE(plan.x.size() == 1);
  CHECK(plan.x[0] == 2);
  CHECK(plan.objective == -7);
  CHECK(plan.cost_term == 8);
  CHECK(plan.penalty_term == 0);
  CHECK(plan.utility_term == 15);
  CHECK(plan.y[0][0] == 15);
  CHECK(validate_plan(m, plan));
}

TEST_CASE("with no penalty and weak utility the optimum is scale-to-zero") {
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 20, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 15, 0, 1));
  fill_compat(m);

  auto plan = solve(m, 1.0);
  REQUIRE(plan.status == SolveStatus::Optimal);
  CHECK(plan.x[0] == 0);
  CHECK(plan.objective == 0);
  CHECK(validate_plan(m, plan));
}

TEST_CASE("under tight capacity one big version serves both classes") {
  IlpModel m;
  m.capacity.total_cpu_mc = 720;
  m.capacity.total_mem_mib = 1280;
  m.versions.push_back(mver(640, 360, 1, 10, 2));
  m.versions.push_back(mver(1280, 720, 2, 10, 1));
  m.classes.push_back(mclass("a", 640, 360, 5, 10, 1));
  m.classes.push_back(mclass("b", 1280, 720, 5, 10, 1));
  fill_compat(m);

  auto plan = solve(m, 1.0);
  REQUIRE(plan.status == SolveStatus::Optimal);
  // Two small instances would strand class b's demand (5 * penalty 10).
  CHECK(plan.x == std::vector<std::int64_t>{0, 1});
  CHECK(plan.y[0][1] + plan.y[1][1] == 10);
  CHECK(plan.penalty_term == 0);
  CHECK(validate_plan(m, plan));
}

TEST_CASE("lower bounds above capacity are reported infeasible") {
  IlpModel m;
  m.capacity.total_cpu_mc = 100'000;
  m.capacity.total_mem_mib = 100;
  m.versions.push_back(mver(640, 360, 1, 10, 3, /*lower=*/1));
  fill_compat(m);
  auto plan = solve(m, 1.0);
  CHECK(plan.status == SolveStatus::Infeasible);
  CHECK(plan.infeasible_reason ==
        "lower bounds exceed cluster memory capacity");
}

TEST_CASE("served volume is monotone in the utility coefficient") {
  std::int64_t prev_served = -1;
  for (std::int64_t utility : {0, 1, 3, 10, 40}) {
    IlpModel m = big_capacity_model();
    m.versions.push_back(mver(640, 360, 25, 10, 6));
    m.classes.push_back(mclass("f/m640", 640, 360, 50, 0, utility));
    fill_compat(m);
    auto plan = solve(m, 1.0);
    REQUIRE(plan.status == SolveStatus::Optimal);
    std::int64_t served = plan.y[0][0];
    CHECK(served >= prev_served);
    prev_served = served;
  }
  CHECK(prev_served == 50);  // at utility 40 serving everything dominates
}

TEST_CASE("validate_plan rejects doctored plans") {
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 4, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 15, 2, 1));
  fill_compat(m);
  auto plan = solve(m, 1.0);
  REQUIRE(validate_plan(m, plan));

  std::string why;
  auto tampered = plan;
  tampered.y[0][0] += 1;  // exceeds demand and throughput
  CHECK_FALSE(validate_plan(m, tampered, &why));
  CHECK(why == "served exceeds demand for class f/m640");

  tampered = plan;
  tampered.objective -= 1;
  CHECK_FALSE(validate_plan(m, tampered, &why));
  CHECK(why == "objective does not match recomputation");

  tampered = plan;
  tampered.x[0] = 100000;  // blows past memory capacity
  CHECK_FALSE(validate_plan(m, tampered, &why));

  tampered = plan;
  tampered.x.clear();
  CHECK_FALSE(validate_plan(m, tampered, &why));
  CHECK(why == "plan dimensions do not match model");
}

TEST_CASE("build_model derives kappa, bounds and coefficients") {
  FunctionProfile profile;
  profile.name = "f";
  profile.mem_req = PiecewiseLinear({{0, 512}, {10000, 512}});
  profile.base_time = PiecewiseLinear({{0, 1.0}, {10000, 1.0}});
  profile.mem_speed_exponent = 0.0;
  profile.payload_min = 0;
  profile.payload_max = 10000;

  DemandSnapshot snap;
  snap.capacity.total_cpu_mc = 1'000'000;
  snap.capacity.total_mem_mib = 1'000'000;
  snap.classes.push_back({"f", ResourcePrediction{640, 360, false}, 25, 5000});
  snap.live.push_back({ver(1280, 720), 2, 1, true});

  OptimizerConfig cfg;  // interval 60s, 10 requests/min -> kappa 10
  PricingView pricing;
  auto m = build_model(snap, {profile}, pricing, cfg, 10, 300.0, 100);

  REQUIRE(m.versions.size() == 2);
  REQUIRE(m.classes.size() == 1);
  const auto& live_v = m.versions[0];
  const auto& demand_v = m.versions[1];
  CHECK(live_v.version.mem_mib == 1280);
  CHECK(live_v.lower == 1);  // served last interval: no scale-to-zero
  CHECK(live_v.live_count == 2);
  CHECK(demand_v.version.mem_mib == 640);
  CHECK(demand_v.lower == 0);
  CHECK(demand_v.kappa == 10);
  // Headroom bound: lower + ceil(25 / 10) = 3 instances suffice.
  CHECK(demand_v.upper == 3);
  CHECK(live_v.upper == 1 + 3);

  // Instance cost: mem_GiB * interval * GB-s price, scaled by 1e6.
  std::int64_t want_cost = static_cast<std::int64_t>(std::llround(
      (640.0 / 1024.0) * 60.0 * pricing.price_per_gb_s * cfg.coeff_scale));
  CHECK(demand_v.cost_coeff == want_cost);

  // Penalty is twice the per-request execution cost; utility is 1x.
  double exec_cost = (640.0 / 1024.0) * 1.0 * pricing.price_per_gb_s +
                     pricing.price_per_request;
  CHECK(m.classes[0].penalty_coeff ==
        static_cast<std::int64_t>(std::llround(2.0 * exec_cost * 1e6)));
  CHECK(m.classes[0].utility_coeff ==
        static_cast<std::int64_t>(std::llround(exec_cost * 1e6)));

  // The larger live version can serve the class; not vice versa.
  CHECK(m.compat[0][0] == 1);
  CHECK(m.compat[0][1] == 1);
}

TEST_CASE("build_model with zero demand still keeps served versions alive") {
  DemandSnapshot snap;
  snap.capacity.total_cpu_mc = 10'000;
  snap.capacity.total_mem_mib = 10'000;
  snap.live.push_back({ver(640, 360), 3, 0, true});
  OptimizerConfig cfg;
  auto m = build_model(snap, {}, PricingView{}, cfg, 10, 300.0, 100);
  REQUIRE(m.versions.size() == 1);
  CHECK(m.classes.empty());
  CHECK(m.versions[0].lower == 1);
  CHECK(m.versions[0].upper == 1);  // no demand: only the floor is useful
  auto plan = solve(m, 1.0);
  REQUIRE(plan.status == SolveStatus::Optimal);
  CHECK(plan.x[0] == 1);
}

TEST_CASE("reconcile emits no actions at a fixed point") {
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 4, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 15, 2, 1));
  fill_compat(m);
  auto plan = solve(m, 1.0);
  REQUIRE(plan.x[0] == 2);
  std::vector<DemandSnapshot::LiveVersion> live{{ver(640, 360), 2, 0, true}};
  CHECK(reconcile(m, plan, live, {}).empty());
}

TEST_CASE("reconcile scales down only to the busy floor") {
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 100, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 5, 0, 1));
  fill_compat(m);
  auto plan = solve(m, 1.0);
  REQUIRE(plan.x[0] == 0);  // cost swamps utility

  std::vector<DemandSnapshot::LiveVersion> live{{ver(640, 360), 3, 2, true}};
  auto actions = reconcile(m, plan, live, {});
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].from == 3);
  CHECK(actions[0].to == 2);  // two instances are busy and stay

  // A suppressed version keeps its count entirely.
  auto suppressed = reconcile(m, plan, live, {ver(640, 360).id()});
  CHECK(suppressed.empty());
}

TEST_CASE("reconcile scales a fresh version up from zero") {
  IlpModel m = big_capacity_model();
  m.versions.push_back(mver(640, 360, 4, 10, 5));
  m.classes.push_back(mclass("f/m640", 640, 360, 15, 2, 1));
  fill_compat(m);
  auto plan = solve(m, 1.0);
  auto actions = reconcile(m, plan, {}, {});
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].from == 0);
  CHECK(actions[0].to == 2);
}

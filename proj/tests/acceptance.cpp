// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Usage: acceptance_tests <repo root> (for configs/ and profiles/).
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "saarthi/config.hpp"
#include "saarthi/simengine.hpp"

using namespace saarthi;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) g_failures++;
}

struct Check {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& msg) {
    if (ok && !cond) {
      ok = false;
      why = msg;
    }
  }
};

// ---------------------------------------------------------------------------
// Criterion 1: branch-and-bound objective equals an independent oracle on
// randomly generated models. The oracle enumerates instance vectors and, for
// each, maximizes the weighted served volume over the bipartite service
// polytope with a polymatroid greedy (exact because the reachable-capacity
// set function is submodular), sharing no code with solve_transport.
// ---------------------------------------------------------------------------

std::int64_t oracle_served_value(const IlpModel& m,
                                 const std::vector<std::int64_t>& caps,
                                 std::vector<std::int64_t>* served_out) {
  const size_t nr = m.classes.size();
  const size_t nv = m.versions.size();
  std::vector<size_t> order(nr);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return m.classes[a].penalty_coeff + m.classes[a].utility_coeff >
           m.classes[b].penalty_coeff + m.classes[b].utility_coeff;
  });
  // cap(N(S)): total throughput of versions compatible with any class in S.
  auto cap_of_subset = [&](unsigned mask) {
    std::int64_t cap = 0;
    for (size_t v = 0; v < nv; ++v) {
      bool reachable = false;
      for (size_t r = 0; r < nr && !reachable; ++r)
        if ((mask >> r & 1u) && m.compat[r][v]) reachable = true;
      if (reachable) cap += caps[v];
    }
    return cap;
  };
  std::vector<std::int64_t> served(nr, 0);
  std::int64_t value = 0;
  for (size_t r : order) {
    std::int64_t room = m.classes[r].demand;
    for (unsigned mask = 0; mask < (1u << nr); ++mask) {
      if (!(mask >> r & 1u)) continue;
      std::int64_t committed = 0;
      for (size_t r2 = 0; r2 < nr; ++r2)
        if (mask >> r2 & 1u) committed += served[r2];
      room = std::min(room, cap_of_subset(mask) - committed);
    }
    served[r] = std::max<std::int64_t>(0, room);
    value += served[r] *
             (m.classes[r].penalty_coeff + m.classes[r].utility_coeff);
  }
  if (served_out) *served_out = served;
  return value;
}

std::int64_t oracle_optimum(const IlpModel& m) {
  const size_t nv = m.versions.size();
  std::int64_t base_penalty = 0;
  for (const auto& c : m.classes) base_penalty += c.demand * c.penalty_coeff;
  std::int64_t best = 0;
  bool have = false;
  std::vector<std::int64_t> x(nv, 0);
  std::function<void(size_t, std::int64_t, std::int64_t)> rec =
      [&](size_t idx, std::int64_t cpu, std::int64_t mem) {
        if (idx == nv) {
          std::vector<std::int64_t> caps(nv);
          std::int64_t cost = 0;
          for (size_t v = 0; v < nv; ++v) {
            caps[v] = x[v] * m.versions[v].kappa;
            cost += x[v] * m.versions[v].cost_coeff;
          }
          std::int64_t obj =
              cost + base_penalty - oracle_served_value(m, caps, nullptr);
          if (!have || obj < best) {
            have = true;
            best = obj;
          }
          return;
        }
        for (std::int64_t k = m.versions[idx].lower;
             k <= m.versions[idx].upper; ++k) {
          std::int64_t ncpu = cpu + k * m.versions[idx].cpu_mc;
          std::int64_t nmem = mem + k * m.versions[idx].mem_mib;
          if (ncpu > m.capacity.total_cpu_mc ||
              nmem > m.capacity.total_mem_mib)
            break;
          x[idx] = k;
          rec(idx + 1, ncpu, nmem);
          x[idx] = m.versions[idx].lower;
        }
      };
  rec(0, 0, 0);
  return best;
}

IlpModel random_model(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  IlpModel m;
  const size_t nv = static_cast<size_t>(pick(1, 4));
  const size_t nr = static_cast<size_t>(pick(1, 3));
  for (size_t v = 0; v < nv; ++v) {
    ModelVersion mv;
    mv.version.function = "f";
    mv.version.mem_mib = pick(1, 8) * 128;
    mv.version.cpu_mc = pick(1, 8) * 72;
    mv.mem_mib = mv.version.mem_mib;
    mv.cpu_mc = mv.version.cpu_mc;
    mv.cost_coeff = pick(0, 50);
    mv.kappa = pick(1, 10);
    mv.lower = 0;
    mv.upper = 5;
    m.versions.push_back(std::move(mv));
  }
  for (size_t r = 0; r < nr; ++r) {
    ModelClass c;
    c.id = "c" + std::to_string(r);
    c.function = "f";
    c.required =
        ResourcePrediction{pick(1, 8) * 128, pick(1, 8) * 72, false};
    c.demand = pick(0, 20);
    c.penalty_coeff = pick(0, 20);
    c.utility_coeff = pick(0, 20);
    m.classes.push_back(std::move(c));
  }
  m.compat.assign(nr, std::vector<char>(nv, 0));
  for (size_t r = 0; r < nr; ++r)
    for (size_t v = 0; v < nv; ++v)
      m.compat[r][v] = can_serve(m.versions[v].version, m.classes[r].required);
  m.capacity.total_cpu_mc = pick(500, 4000);
  m.capacity.total_mem_mib = pick(500, 6000);
  return m;
}

void criterion_1() {
  Check c;
  std::mt19937_64 rng(20250826);
  double worst_solve_s = 0.0;
  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    IlpModel m = random_model(rng);
    auto t0 = std::chrono::steady_clock::now();
    OptimizerPlan plan = solve(m, 1.0);
    double dt = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    worst_solve_s = std::max(worst_solve_s, dt);
    c.expect(dt < 1.0, "solve exceeded 1 s on trial " + std::to_string(trial));
    c.expect(plan.status == SolveStatus::Optimal,
             "non-optimal status on trial " + std::to_string(trial));
    if (!c.ok) break;
    std::string why;
    c.expect(validate_plan(m, plan, &why),
             "invalid plan on trial " + std::to_string(trial) + ": " + why);
    std::int64_t want = oracle_optimum(m);
    c.expect(plan.objective == want,
             "objective mismatch on trial " + std::to_string(trial) + ": " +
                 std::to_string(plan.objective) + " vs oracle " +
                 std::to_string(want));
  }
  std::ostringstream os;
  os << "ILP oracle equivalence on 500 random models";
  if (c.ok)
    os << " (exact objectives, worst solve " << worst_solve_s << " s)";
  else
    os << " — " << c.why;
  report(1, c.ok, os.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: queue discipline, asserted on the event log of an adversarial
// run that overflows a single slow-starting instance.
// ---------------------------------------------------------------------------

FunctionProfile flat_profile(double exec_s, double mem_lo, double mem_hi) {
  FunctionProfile p;
  p.name = "f";
  p.mem_req = PiecewiseLinear({{1000, mem_lo}, {9000, mem_hi}});
  p.base_time = PiecewiseLinear({{1000, exec_s}, {9000, exec_s}});
  p.mem_speed_exponent = 0.0;
  p.payload_min = 1000;
  p.payload_max = 9000;
  p.slo_seconds = 15.0;
  return p;
}

void criterion_2() {
  Check c;
  EngineConfig cfg;
  cfg.balancer.explore_p = 0.0;
  cfg.max_instances_per_version = 1;  // everyone fights for one instance
  std::vector<Request> wl;
  std::mt19937_64 rng(99);
  // Waves of bursts so the queue repeatedly fills, drains and overflows.
  std::uint64_t id = 0;
  for (int wave = 0; wave < 30; ++wave) {
    double base = wave * 0.8;
    int n = 4 + static_cast<int>(rng() % 16);
    for (int i = 0; i < n; ++i) {
      Request r;
      r.id = ++id;
      r.function = "f";
      r.payload = 1000;
      r.arrival = seconds_to_us(base + 0.01 * i);
      wl.push_back(r);
    }
  }
  auto res = run(cfg, {flat_profile(0.4, 512, 512)}, wl, Variant::Mvq, 7);

  const int K = cfg.queue.capacity;
  const SimTime residence_cap =
      seconds_to_us(cfg.queue.max_retries * cfg.queue.retry_interval_s);
  std::map<std::string, std::vector<std::int64_t>> fifo;  // version -> ids
  std::map<std::string, int> depth;
  std::map<std::int64_t, std::pair<std::string, SimTime>> queued_at;
  std::int64_t drops_full = 0, drops_retries = 0;
  for (const auto& rec : res.log.records()) {
    if (rec.kind == "queued") {
      c.expect(depth[rec.version] < K, "enqueue into a full queue");
      depth[rec.version]++;
      c.expect(depth[rec.version] <= K, "queue length exceeded K");
      c.expect(rec.detail.at("position").get<int>() == depth[rec.version],
               "reported position disagrees with tracked depth");
      fifo[rec.version].push_back(rec.request_id);
      queued_at[rec.request_id] = {rec.version, rec.at_us};
    } else if (rec.kind == "claimed" || rec.kind == "dropped") {
      auto it = queued_at.find(rec.request_id);
      if (it == queued_at.end()) {
        // queue_full drops never entered the queue; verify fullness below.
        if (rec.kind == "dropped") {
          c.expect(
              rec.detail.at("reason").get<std::string>() == "queue_full",
              "non-queued request dropped for a queue reason");
          c.expect(depth[rec.version] == K,
                   "queue_full drop while the queue had room");
          drops_full++;
        }
        continue;
      }
      auto [ver, t_in] = it->second;
      auto& order = fifo[ver];
      c.expect(!order.empty() && order.front() == rec.request_id,
               "queue exit out of FIFO order");
      if (!order.empty()) order.erase(order.begin());
      depth[ver]--;
      c.expect(depth[ver] >= 0, "queue depth went negative");
      if (rec.kind == "dropped") {
        c.expect(rec.detail.at("reason").get<std::string>() ==
                     "retries_exhausted",
                 "queued request dropped with the wrong reason");
        c.expect(rec.at_us - t_in <= residence_cap,
                 "retry residence exceeded max_retries * retry_interval");
        drops_retries++;
      }
      queued_at.erase(it);
    }
  }
  c.expect(drops_full > 0 && drops_retries > 0,
           "workload was not adversarial enough to overflow the queue");
  std::ostringstream os;
  os << "queue discipline (K=" << K << ", " << drops_full
     << " overflow drops, " << drops_retries
     << " retry drops, FIFO and residence verified)";
  report(2, c.ok, c.ok ? os.str() : os.str() + " — " + c.why);
}

// ---------------------------------------------------------------------------
// Criterion 3: claim atomicity under real thread interleaving.
// ---------------------------------------------------------------------------

void criterion_3() {
  Check c;
  FunctionVersion v;
  v.function = "f";
  v.mem_mib = 640;
  v.cpu_mc = 360;
  v.concurrency_limit = 10;
  InstanceState inst("p0", v);
  inst.mark_ready(0);

  constexpr int kThreads = 10;
  constexpr int kIters = 50'000;  // 2 ops per iteration -> 1e6 operations
  std::atomic<int> holders{0};
  std::atomic<int> max_holders{0};
  std::atomic<bool> violated{false};
  std::atomic<std::int64_t> grants{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < kThreads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(1000 + t);
      for (int i = 0; i < kIters; ++i) {
        if (inst.try_claim()) {
          int h = holders.fetch_add(1) + 1;
          int seen = max_holders.load();
          while (h > seen && !max_holders.compare_exchange_weak(seen, h)) {
          }
          int cp = inst.active_connections();
          if (h > 10 || cp < 1 || cp > 10) violated.store(true);
          grants.fetch_add(1);
          // Randomized hold time to vary the interleavings.
          if (rng() % 4 == 0) std::this_thread::yield();
          holders.fetch_sub(1);
          inst.release(0);
        } else if (rng() % 8 == 0) {
          std::this_thread::yield();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  c.expect(!violated.load(), "0 <= C_p <= M_p violated or slot double-granted");
  c.expect(inst.active_connections() == 0, "connections leaked");
  c.expect(grants.load() > 0, "no claim ever succeeded");
  std::ostringstream os;
  os << "claim atomicity over 1e6 threaded operations (" << grants.load()
     << " grants, peak concurrency " << max_holders.load() << "/10)";
  report(3, c.ok, c.ok ? os.str() : os.str() + " — " + c.why);
}

// ---------------------------------------------------------------------------
// Criterion 4: routing-policy fidelity: all three branches plus the explore
// frequencies of both modes over 1e5 seeded decisions.
// ---------------------------------------------------------------------------

void criterion_4() {
  Check c;
  auto ver = [](std::int64_t mem, std::int64_t cpu) {
    FunctionVersion v;
    v.function = "f";
    v.mem_mib = mem;
    v.cpu_mc = cpu;
    v.concurrency_limit = 10;
    return v;
  };
  ResourcePrediction pred{640, 360, false};
  FunctionVersion exact = ver(640, 360);
  std::mt19937_64 rng(42);
  BalancerConfig bcfg;

  // Branch (a): exact idle instance is always used.
  {
    std::vector<VersionView> cands{{ver(1280, 720), 2}, {exact, 1}};
    auto d = route(pred, exact, cands, true, 2, rng, bcfg);
    c.expect(d.kind == RouteKind::RouteExisting &&
                 d.version.same_config(exact) && !d.explored,
             "exact-idle branch not taken");
  }
  // Branch (b): scored exploitation picks the best-scoring candidate.
  {
    BalancerConfig never = bcfg;
    never.explore_p = 0.0;
    std::vector<VersionView> cands{{ver(1280, 720), 1}, {ver(768, 432), 1}};
    auto d = route(pred, exact, cands, false, 2, rng, never);
    c.expect(d.kind == RouteKind::RouteExisting && d.version.mem_mib == 768,
             "scored exploitation did not pick the argmin");
  }
  // Branch (c): no idle candidate forces a cold start (or queue at cap).
  {
    std::vector<VersionView> none;
    auto d = route(pred, exact, none, false, 1, rng, bcfg);
    c.expect(d.kind == RouteKind::ColdStartNew, "cold-start branch not taken");
    auto q = route(pred, exact, none, false, bcfg.max_versions, rng, bcfg);
    c.expect(q.kind == RouteKind::Enqueue,
             "version cap did not degrade to the queue");
  }
  // Window mode explores half the time by symmetry of the score window.
  {
    BalancerConfig wcfg = bcfg;
    wcfg.explore_mode = ExploreMode::Window;
    std::vector<VersionView> cands{{ver(1280, 720), 1}};
    int explored = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i)
      if (route(pred, exact, cands, false, 1, rng, wcfg).explored) ++explored;
    double rate = static_cast<double>(explored) / n;
    c.expect(std::abs(rate - 0.50) <= 0.01,
             "window explore rate " + std::to_string(rate) + " not 0.50±0.01");
  }
  // Bernoulli mode explores at its configured probability (0.2 default).
  {
    std::vector<VersionView> cands{{ver(1280, 720), 1}};
    int explored = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i)
      if (route(pred, exact, cands, false, 1, rng, bcfg).explored) ++explored;
    double rate = static_cast<double>(explored) / n;
    c.expect(std::abs(rate - 0.20) <= 0.01,
             "bernoulli explore rate " + std::to_string(rate) +
                 " not 0.20±0.01");
  }
  report(4, c.ok,
         c.ok ? "routing policy: all three branches, window 0.50±0.01, "
                "bernoulli 0.20±0.01 over 1e5 decisions"
              : "routing policy — " + c.why);
}

// ---------------------------------------------------------------------------
// Criterion 5: redundancy arithmetic, cooldown spacing, and post-burst
// recovery in a full run with induced OOM failures.
// ---------------------------------------------------------------------------

void criterion_5() {
  Check c;
  // Arithmetic: 3 replicas with 2 failing scale to exactly 5.
  {
    std::map<std::string, SimTime> last;
    RedundancyConfig rcfg;
    FunctionVersion v;
    v.function = "f";
    v.mem_mib = 640;
    v.cpu_mc = 360;
    auto actions = scan_and_scale({{v, 3, 2}}, seconds_to_us(60), last, rcfg);
    c.expect(actions.size() == 1 && actions[0].from == 3 && actions[0].to == 5,
             "3 replicas with 2 failures did not scale to 5");
  }

  // Full run: a steady stream with a mid-run burst of mispredicted payloads
  // that OOM-kill shared instances; the redundancy scanner replaces them.
  EngineConfig cfg;
  cfg.predictor.kind = PredictorKind::NoisyOracle;
  cfg.predictor.noise_pct = 0.30;
  cfg.predictor.quantize_step_mib = 1;
  std::vector<Request> wl;
  std::uint64_t id = 0;
  for (int k = 0; k < 600; ++k) {  // steady: 2/s for 300 s, one payload
    Request r;
    r.id = ++id;
    r.function = "f";
    r.payload = 5000;  // true requirement 900 MiB
    r.arrival = seconds_to_us(0.5 * k);
    wl.push_back(r);
  }
  for (int i = 0; i < 60; ++i) {  // burst in [60, 90): distinct payloads
    Request r;
    r.id = ++id;
    r.function = "f";
    r.payload = 6000 + i;  // true requirement > 1000 MiB
    r.arrival = seconds_to_us(60.0 + 0.5 * i);
    wl.push_back(r);
  }
  std::stable_sort(wl.begin(), wl.end(),
                   [](const Request& a, const Request& b) {
                     return a.arrival < b.arrival;
                   });
  // Profile: requirement grows with payload so under-predicted bursts land
  // on instances sized for the steady class and die there.
  auto profile = flat_profile(0.3, 500, 1300);
  auto res = run(cfg, {profile}, wl, Variant::Mevq, 3);

  c.expect(res.report.aggregate.failed_oom > 0,
           "burst induced no OOM failures");

  // Cooldown: no two redundancy actions on one version within 30 s.
  std::map<std::string, SimTime> last_action;
  int redundancy_actions = 0;
  for (const auto& rec : res.log.records()) {
    if (rec.kind != "scale_action" ||
        rec.detail.at("source").get<std::string>() != "redundancy")
      continue;
    redundancy_actions++;
    auto it = last_action.find(rec.version);
    if (it != last_action.end())
      c.expect(rec.at_us - it->second >= seconds_to_us(30.0),
               "two redundancy actions on one version within 30 s");
    last_action[rec.version] = rec.at_us;
  }
  c.expect(redundancy_actions > 0, "redundancy scanner never acted");

  // Recovery: success per 10 s arrival bucket. The bucket three scan
  // intervals (45 s) after the burst must be within 5 points of pre-burst.
  std::map<std::int64_t, std::pair<int, int>> buckets;  // ok, total
  std::map<std::int64_t, SimTime> arrivals;
  for (const auto& rec : res.log.records()) {
    if (rec.kind == "arrival") arrivals[rec.request_id] = rec.at_us;
    if (rec.kind == "exec_done" || rec.kind == "dropped") {
      std::int64_t b = arrivals.at(rec.request_id) / seconds_to_us(10.0);
      buckets[b].second++;
      if (rec.kind == "exec_done" &&
          rec.detail.at("outcome").get<std::string>() == "succeeded")
        buckets[b].first++;
    }
  }
  auto rate = [&](std::int64_t b) {
    auto [ok, total] = buckets[b];
    return total ? static_cast<double>(ok) / total : 0.0;
  };
  double pre = rate(5);        // [50, 60)
  double dip = std::min(rate(6), std::min(rate(7), rate(8)));  // burst window
  double post = rate(13);      // [130, 140): before 90 + 45 s has elapsed...
  double recovered = rate(14); // [140, 150): > burst end + 3 scan intervals
  (void)post;
  c.expect(pre >= 0.95, "steady stream unhealthy before the burst");
  c.expect(dip < pre, "burst did not dent the success rate");
  c.expect(recovered >= pre - 0.05,
           "success rate had not recovered 3 scan intervals after the burst");
  std::ostringstream os;
  os << "redundancy: 3->5 exact, " << redundancy_actions
     << " actions all >=30s apart, success " << pre << " -> " << dip
     << " -> " << recovered << " (recovered)";
  report(5, c.ok, c.ok ? os.str() : os.str() + " — " + c.why);
}

// ---------------------------------------------------------------------------
// Criteria 6-9 share the ablation sweep defined by configs/ablation.json.
// ---------------------------------------------------------------------------

struct SweepResult {
  std::map<std::string, std::vector<MetricsReport>> by_variant;
  std::vector<RunResult> runs;  // for billing cross-checks
  double worst_wall_s = 0.0;
  EngineConfig engine;
  std::vector<FunctionProfile> profiles;
  ExperimentConfig cfg;
};

SweepResult run_sweep() {
  SweepResult out;
  out.cfg = load_config("configs/ablation.json");
  out.profiles = load_profiles(out.cfg);
  validate_config(out.cfg, out.profiles);
  out.engine = out.cfg.engine;
  for (auto variant : out.cfg.variants) {
    for (auto seed : out.cfg.seeds) {
      auto wl = build_workload(out.cfg, out.profiles, seed);
      auto t0 = std::chrono::steady_clock::now();
      auto res = run(out.engine, out.profiles, wl, variant, seed);
      double dt = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      out.worst_wall_s = std::max(out.worst_wall_s, dt);
      out.by_variant[to_string(variant)].push_back(res.report);
      out.runs.push_back(std::move(res));
    }
  }
  return out;
}

double mean_cost(const std::vector<MetricsReport>& rs) {
  double sum = 0;
  for (const auto& r : rs) sum += r.total_cost_dollars();
  return sum / rs.size();
}

double mean_success(const std::vector<MetricsReport>& rs) {
  double sum = 0;
  for (const auto& r : rs) sum += r.aggregate.success_rate();
  return sum / rs.size();
}

void criterion_6(const SweepResult& sweep) {
  Check c;
  c.expect(sweep.by_variant.count("baseline") && sweep.by_variant.count("mvq") &&
               sweep.by_variant.count("mevq") && sweep.by_variant.count("moevq"),
           "ablation config does not cover all four variants");
  if (!c.ok) {
    report(6, false, "directional ablation — " + c.why);
    return;
  }
  double base_cost = mean_cost(sweep.by_variant.at("baseline"));
  double base_succ = mean_success(sweep.by_variant.at("baseline"));
  double moevq_cost = mean_cost(sweep.by_variant.at("moevq"));
  double moevq_succ = mean_success(sweep.by_variant.at("moevq"));
  double mvq_succ = mean_success(sweep.by_variant.at("mvq"));
  double mevq_succ = mean_success(sweep.by_variant.at("mevq"));

  c.expect(moevq_cost <= 0.9 * base_cost,
           "moevq cost " + std::to_string(moevq_cost) + " not <= 0.9 * " +
               std::to_string(base_cost));
  c.expect(moevq_succ >= base_succ, "moevq success below baseline");
  c.expect(mevq_succ >= mvq_succ, "mevq success below mvq");
  c.expect(sweep.worst_wall_s <= 60.0,
           "a run exceeded 60 s wall-clock: " +
               std::to_string(sweep.worst_wall_s));
  std::ostringstream os;
  os.precision(4);
  os << "directional ablation over 5 seeds: moevq cost " << moevq_cost
     << " <= 0.9x baseline " << base_cost << ", success " << moevq_succ
     << " >= " << base_succ << ", mevq >= mvq, worst run "
     << sweep.worst_wall_s << " s";
  report(6, c.ok, c.ok ? os.str() : os.str() + " — " + c.why);
}

void criterion_7(const SweepResult& sweep) {
  Check c;
  // Saarthi critical-path overhead: arrival -> routing decision, which is
  // exactly prediction latency plus balancer latency, never more than 0.2 s.
  SimTime cap = seconds_to_us(0.2);
  SimTime worst = 0;
  std::int64_t measured = 0;
  for (const auto& res : sweep.runs) {
    const auto& header = res.log.records().front().detail;
    if (header.at("variant").get<std::string>() == "baseline") continue;
    std::map<std::int64_t, SimTime> arrivals;
    for (const auto& rec : res.log.records()) {
      if (rec.kind == "arrival") arrivals[rec.request_id] = rec.at_us;
      if (rec.kind == "routing_done") {
        SimTime overhead = rec.at_us - arrivals.at(rec.request_id);
        worst = std::max(worst, overhead);
        measured++;
        c.expect(overhead <= cap,
                 "request overhead " + std::to_string(overhead) +
                     " us exceeds 0.2 s");
      }
    }
  }
  c.expect(measured > 0, "no routed requests found in the sweep");
  std::ostringstream os;
  os << "critical-path overhead <= 0.2 s on " << measured
     << " requests (worst " << us_to_seconds(worst) << " s)";
  report(7, c.ok, c.ok ? os.str() : os.str() + " — " + c.why);
}

void criterion_8(const SweepResult& sweep) {
  Check c;
  // Byte-identical replay of one (config, seed) cell.
  auto wl = build_workload(sweep.cfg, sweep.profiles, sweep.cfg.seeds.front());
  auto a = run(sweep.engine, sweep.profiles, wl, Variant::Moevq, 1);
  auto b = run(sweep.engine, sweep.profiles, wl, Variant::Moevq, 1);
  std::ostringstream sa, sb;
  a.log.write(sa);
  b.log.write(sb);
  c.expect(sa.str() == sb.str(), "two identical runs produced different logs");

  // Replay through the file round trip reproduces the report exactly.
  auto path = std::filesystem::temp_directory_path() / "saarthi_accept8.log";
  a.log.write_file(path.string());
  auto replayed = replay_metrics(EventLog::read_file(path.string()));
  std::filesystem::remove(path);
  const auto& r1 = a.report;
  c.expect(replayed.variant == r1.variant && replayed.seed == r1.seed,
           "replayed identity differs");
  c.expect(replayed.per_function.size() == r1.per_function.size(),
           "replayed function set differs");
  for (const auto& [fn, m] : r1.per_function) {
    const auto& m2 = replayed.per_function.at(fn);
    c.expect(m2.total_requests == m.total_requests &&
                 m2.succeeded == m.succeeded &&
                 m2.failed_oom == m.failed_oom &&
                 m2.dropped_queue_full == m.dropped_queue_full &&
                 m2.dropped_retries == m.dropped_retries &&
                 m2.sla_e2e_met == m.sla_e2e_met &&
                 m2.sla_exec_met == m.sla_exec_met && m2.cost == m.cost,
             "replayed metrics differ for function " + fn);
  }
  c.expect(replayed.aggregate.cost == r1.aggregate.cost &&
               replayed.scale_events == r1.scale_events &&
               replayed.unique_configurations == r1.unique_configurations &&
               replayed.total_unique_instances == r1.total_unique_instances,
           "replayed aggregates differ");
  report(8, c.ok,
         c.ok ? "determinism: byte-identical logs and exact replay of every "
                "metric"
              : "determinism — " + c.why);
}

void criterion_9(const SweepResult& sweep) {
  Check c;
  // Streaming billing equals the log-replayed aggregate exactly, per run.
  for (const auto& res : sweep.runs) {
    c.expect(res.streaming_cost == res.report.aggregate.cost,
             "streaming cost differs from replayed cost for " +
                 res.report.variant + " seed " +
                 std::to_string(res.report.seed));
  }
  // Trivial cases: zero and exact linearity of the fixed-point accumulator.
  Cost zero;
  c.expect(zero == Cost{} && zero.dollars(0) == 0.0, "zero cost not zero");
  std::int64_t rate = Cost::rate_pico(0.0000166667);
  Cost one, twice_mem, twice_ms;
  one.add_execution(640, 1500, rate);
  twice_mem.add_execution(1280, 1500, rate);
  twice_ms.add_execution(640, 3000, rate);
  c.expect(twice_mem.duration_num == 2 * one.duration_num &&
               twice_ms.duration_num == 2 * one.duration_num,
           "billing is not exactly linear");
  report(9, c.ok,
         c.ok ? "billing exactness: streaming == replay on all " +
                    std::to_string(sweep.runs.size()) +
                    " runs, zero/linearity exact"
              : "billing — " + c.why);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) std::filesystem::current_path(argv[1]);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  SweepResult sweep = run_sweep();
  criterion_6(sweep);
  criterion_7(sweep);
  criterion_8(sweep);
  criterion_9(sweep);
  if (g_failures) {
    std::printf("ACCEPTANCE: %d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("ACCEPTANCE: all 9 criteria passed\n");
  return 0;
}

#include "saarthi/simengine.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>

namespace saarthi {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::BaselineStatic: return "baseline";
    case Variant::Mvq: return "mvq";
    case Variant::Mevq: return "mevq";
    case Variant::Moevq: return "moevq";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "baseline" || s == "baseline_static") return Variant::BaselineStatic;
  if (s == "mvq") return Variant::Mvq;
  if (s == "mevq") return Variant::Mevq;
  if (s == "moevq") return Variant::Moevq;
  throw std::invalid_argument("unknown variant: " + s);
}

ExecOutcome execute_model(const FunctionProfile& profile, std::int64_t payload,
                          const FunctionVersion& version,
                          std::int64_t concurrent_cpu_demand_mc,
                          const LatencyConfig& latency, double timeout_s) {
  ExecOutcome out;
  std::int64_t floor_mem = profile.mem_required(payload);
  if (version.mem_mib < floor_mem) {
    out.oom = true;
    out.duration_s =
        profile.exec_seconds(payload, floor_mem) * latency.oom_fraction;
    return out;
  }
  double nominal = profile.exec_seconds(payload, version.mem_mib);
  out.sharing_factor =
      std::max(1.0, static_cast<double>(concurrent_cpu_demand_mc) /
                        static_cast<double>(version.cpu_mc));
  out.duration_s = std::min(nominal * out.sharing_factor, timeout_s);
  return out;
}

namespace {

enum class EvKind {
  ColdStartDone = 0,
  ExecutionDone = 1,
  QueueRetryTick = 2,
  InstanceExpired = 3,
  RedundancyTick = 4,
  OptimizerApply = 5,
  OptimizerTick = 6,
  PredictorRefresh = 7,
  Arrival = 8,
  PredictionDone = 9,
  RoutingDone = 10,
};

struct Event {
  SimTime at = 0;
  EvKind kind = EvKind::Arrival;
  std::uint64_t seq = 0;
  std::uint64_t req_id = 0;
  std::string a;  // instance or version id, kind-specific
  std::string b;
  std::uint64_t epoch = 0;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    if (x.at != y.at) return x.at > y.at;
    if (x.kind != y.kind) return static_cast<int>(x.kind) > static_cast<int>(y.kind);
    return x.seq > y.seq;
  }
};

struct ExecInfo {
  std::string instance_id;
  std::uint64_t instance_epoch = 0;
  std::int64_t cpu_demand_mc = 0;
  SimTime started = 0;
  SimTime duration_us = 0;
  bool oom = false;
};

struct VersionRuntime {
  FunctionVersion version;
  std::vector<std::unique_ptr<InstanceState>> instances;
  RetryQueue queue;
  bool tick_scheduled = false;
  bool reactive_pending = false;
  std::int64_t lower_bound = 0;
  bool served_last_interval = false;
  std::uint64_t instance_counter = 0;

  explicit VersionRuntime(FunctionVersion v, int queue_capacity)
      : version(std::move(v)), queue(queue_capacity) {}
};

struct DemandAccumulator {
  std::int64_t count = 0;
  std::int64_t payload_sum = 0;
};

class Engine {
 public:
  Engine(const EngineConfig& cfg,
         const std::vector<FunctionProfile>& profiles,
         const std::vector<Request>& workload, Variant variant,
         std::uint64_t seed)
      : cfg_(cfg),
        variant_(variant),
        seed_(seed),
        cs_rng_(seed ^ 0x636f6c64ULL),
        route_rng_(seed ^ 0x726f757465ULL),
        predictor_(make_predictor_config(cfg, seed)) {
    for (const auto& p : profiles) {
      p.validate();
      profiles_[p.name] = p;
    }
    for (const auto& r : workload) {
      if (!profiles_.count(r.function))
        throw std::invalid_argument("no profile for workload function '" +
                                    r.function + "'");
      requests_[r.id] = r;
    }
    workload_ = workload;
  }

 private:
  static PredictorConfig make_predictor_config(const EngineConfig& cfg,
                                               std::uint64_t seed) {
    PredictorConfig pc = cfg.predictor;
    pc.seed = seed ^ 0x70726564ULL;
    return pc;
  }

  bool use_predictor() const { return variant_ != Variant::BaselineStatic; }
  bool use_redundancy() const {
    return variant_ == Variant::Mevq || variant_ == Variant::Moevq;
  }
  bool use_optimizer() const { return variant_ == Variant::Moevq; }
  bool work_remaining() const {
    return outstanding_ > 0 || arrivals_pending_ > 0;
  }

  void schedule(SimTime at, EvKind kind, std::uint64_t req_id = 0,
                std::string a = {}, std::string b = {},
                std::uint64_t epoch = 0) {
    events_.push(Event{at, kind, event_seq_++, req_id, std::move(a),
                       std::move(b), epoch});
  }

  LogRecord& log(std::string kind) { return result_.log.append(now_, std::move(kind)); }

  VersionRuntime& ensure_version(const FunctionVersion& v) {
    auto key = v.id();
    auto it = versions_.find(key);
    if (it == versions_.end()) {
      FunctionVersion full = v;
      full.concurrency_limit = cfg_.concurrency_limit;
      full.keep_alive_s = cfg_.keep_alive_s;
      it = versions_
               .emplace(key, VersionRuntime(full, cfg_.queue.capacity))
               .first;
      function_versions_[v.function].push_back(key);
    }
    return it->second;
  }

  std::int64_t used_cpu() const {
    std::int64_t c = 0;
    for (const auto& [k, vr] : versions_)
      c += static_cast<std::int64_t>(vr.instances.size()) * vr.version.cpu_mc;
    return c;
  }
  std::int64_t used_mem() const {
    std::int64_t m = 0;
    for (const auto& [k, vr] : versions_)
      m += static_cast<std::int64_t>(vr.instances.size()) * vr.version.mem_mib;
    return m;
  }
  bool capacity_allows(const FunctionVersion& v) const {
    return used_cpu() + v.cpu_mc <= cfg_.cluster.total_cpu_mc &&
           used_mem() + v.mem_mib <= cfg_.cluster.total_mem_mib;
  }

  int live_version_count() const {
    int n = 0;
    for (const auto& [k, vr] : versions_)
      if (!vr.instances.empty()) ++n;
    return n;
  }

  double sample_cold_start() {
    std::uniform_real_distribution<double> d(cfg_.latency.cold_start_min_s,
                                             cfg_.latency.cold_start_max_s);
    return d(cs_rng_);
  }

  // Creates a cold-starting instance; returns nullptr if capacity or the
  // per-version cap forbids it.
  InstanceState* create_instance(VersionRuntime& vr, const char* cause) {
    if (static_cast<std::int64_t>(vr.instances.size()) >=
        cfg_.max_instances_per_version)
      return nullptr;
    if (!capacity_allows(vr.version)) return nullptr;
    std::string id =
        vr.version.id() + "#" + std::to_string(++vr.instance_counter);
    vr.instances.push_back(std::make_unique<InstanceState>(id, vr.version));
    InstanceState* inst = vr.instances.back().get();
    double delay = cfg_.latency.apply_action_s + sample_cold_start();
    auto& rec = log("cold_start_begin");
    rec.version = vr.version.id();
    rec.detail["instance"] = id;
    rec.detail["cause"] = cause;
    schedule(now_ + seconds_to_us(delay), EvKind::ColdStartDone, 0, id,
             vr.version.id());
    return inst;
  }

  InstanceState* find_instance(const std::string& version_id,
                               const std::string& instance_id,
                               VersionRuntime** out_vr = nullptr) {
    auto it = versions_.find(version_id);
    if (it == versions_.end()) return nullptr;
    for (auto& up : it->second.instances) {
      if (up->id() == instance_id) {
        if (out_vr) *out_vr = &it->second;
        return up.get();
      }
    }
    return nullptr;
  }

  void remove_instance(VersionRuntime& vr, const std::string& instance_id,
                       const char* cause) {
    auto it = std::find_if(
        vr.instances.begin(), vr.instances.end(),
        [&](const auto& up) { return up->id() == instance_id; });
    if (it == vr.instances.end()) return;
    auto& rec = log("instance_removed");
    rec.version = vr.version.id();
    rec.detail["instance"] = instance_id;
    rec.detail["cause"] = cause;
    parked_.erase(instance_id);
    vr.instances.erase(it);
  }

  // ---- request lifecycle -------------------------------------------------

  void on_arrival(Request& req) {
    auto& rec = log("arrival");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.detail["function"] = req.function;
    rec.detail["payload"] = req.payload;
    arrivals_pending_--;
    outstanding_++;

    if (!use_predictor()) {
      req.state = RequestState::Routed;
      req.routed_at = now_;
      auto& vr = baseline_version(req.function);
      attempt_claim_or_enqueue(req, vr);
      return;
    }
    const auto& profile = profiles_.at(req.function);
    PredictOutcome p = predictor_.predict(req, profile);
    req.pred = p.pred;
    schedule(now_ + seconds_to_us(p.latency_s), EvKind::PredictionDone,
             req.id);
  }

  void on_prediction_done(Request& req) {
    req.state = RequestState::Predicted;
    req.predicted_at = now_;
    auto& rec = log("prediction_done");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.detail["mem_mib"] = req.pred.mem_mib;
    rec.detail["cpu_mc"] = req.pred.cpu_mc;
    rec.detail["cached"] = req.pred.cached;
    demand_[{req.function, req.pred.mem_mib}].count++;
    demand_[{req.function, req.pred.mem_mib}].payload_sum += req.payload;
    schedule(now_ + seconds_to_us(cfg_.balancer.balancer_latency_s),
             EvKind::RoutingDone, req.id);
  }

  void on_routing_done(Request& req) {
    req.state = RequestState::Routed;
    req.routed_at = now_;

    FunctionVersion exact;
    exact.function = req.function;
    exact.mem_mib = req.pred.mem_mib;
    exact.cpu_mc = req.pred.cpu_mc;

    std::vector<VersionView> candidates;
    bool exact_deployed = false;
    if (auto fit = function_versions_.find(req.function);
        fit != function_versions_.end()) {
      for (const auto& key : fit->second) {
        auto& vr = versions_.at(key);
        if (vr.instances.empty()) continue;
        int idle = 0;
        for (const auto& up : vr.instances)
          if (is_idle(*up)) ++idle;
        candidates.push_back(VersionView{vr.version, idle});
        if (vr.version.same_config(exact)) exact_deployed = true;
      }
    }

    RoutingDecision d =
        route(req.pred, exact, candidates, exact_deployed,
              live_version_count(), route_rng_, cfg_.balancer);

    auto& rec = log("routing_done");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.version = d.version.id();
    rec.detail["decision"] = d.kind == RouteKind::RouteExisting ? "existing"
                             : d.kind == RouteKind::ColdStartNew
                                 ? "cold_start"
                                 : "enqueue";
    if (!std::isnan(d.score_best)) rec.detail["score_best"] = d.score_best;
    if (!std::isnan(d.score_cs)) rec.detail["score_cs"] = d.score_cs;
    rec.detail["explored"] = d.explored;

    switch (d.kind) {
      case RouteKind::RouteExisting: {
        attempt_claim_or_enqueue(req, versions_.at(d.version.id()));
        break;
      }
      case RouteKind::ColdStartNew: {
        auto& vr = ensure_version(d.version);
        InstanceState* inst = create_instance(vr, "route");
        if (inst) {
          parked_[inst->id()] = req.id;
          req.state = RequestState::Queued;  // waiting for its cold start
          req.queued_at = now_;
        } else {
          enqueue_request(req, vr);
        }
        break;
      }
      case RouteKind::Enqueue: {
        VersionRuntime* target = pick_queue_target(req, exact_deployed, exact);
        if (target) {
          enqueue_request(req, *target);
        } else {
          finish_dropped(req, "queue_full");
        }
        break;
      }
    }
  }

  VersionRuntime* pick_queue_target(const Request& req, bool exact_deployed,
                                    const FunctionVersion& exact) {
    if (exact_deployed) return &versions_.at(exact.id());
    VersionRuntime* best = nullptr;
    double best_score = 0.0;
    VersionRuntime* largest = nullptr;
    auto fit = function_versions_.find(req.function);
    if (fit == function_versions_.end()) return nullptr;
    for (const auto& key : fit->second) {
      auto& vr = versions_.at(key);
      if (vr.instances.empty()) continue;
      if (!largest || vr.version.mem_mib > largest->version.mem_mib)
        largest = &vr;
      if (can_serve(vr.version, req.pred)) {
        double s = version_score(vr.version, req.pred);
        if (!best || s < best_score) {
          best = &vr;
          best_score = s;
        }
      }
    }
    return best ? best : largest;
  }

  VersionRuntime& baseline_version(const std::string& function) {
    FunctionVersion v;
    v.function = function;
    v.mem_mib = cfg_.baseline_mem_mib;
    v.cpu_mc = cpu_from_mem(cfg_.baseline_mem_mib, cfg_.predictor.cpu_per_mib);
    return versions_.at(v.id());
  }

  void attempt_claim_or_enqueue(Request& req, VersionRuntime& vr) {
    std::vector<InstanceState*> insts;
    insts.reserve(vr.instances.size());
    for (auto& up : vr.instances) insts.push_back(up.get());
    ClaimResult r = claim_idle(insts, cfg_.queue.claim_retries);
    if (r.outcome == ClaimOutcome::Claimed) {
      auto& rec = log("claimed");
      rec.request_id = static_cast<std::int64_t>(req.id);
      rec.version = vr.version.id();
      rec.detail["instance"] = r.instance->id();
      start_execution(req, vr, *r.instance);
      return;
    }
    enqueue_request(req, vr);
  }

  void enqueue_request(Request& req, VersionRuntime& vr) {
    ClaimResult r = vr.queue.enqueue(req.id, now_);
    if (r.outcome == ClaimOutcome::DroppedQueueFull) {
      finish_dropped(req, "queue_full", vr.version.id());
      return;
    }
    req.state = RequestState::Queued;
    req.queued_at = now_;
    queue_owner_[req.id] = vr.version.id();
    auto& rec = log("queued");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.version = vr.version.id();
    rec.detail["position"] = r.queue_position;
    if (!vr.tick_scheduled) {
      vr.tick_scheduled = true;
      schedule(now_ + seconds_to_us(cfg_.queue.retry_interval_s),
               EvKind::QueueRetryTick, 0, vr.version.id());
    }
    maybe_reactive_scale(vr);
  }

  // BaselineStatic's platform-style reactive scaling: one pending scale-up
  // at a time while everything is busy and the queue is non-empty.
  void maybe_reactive_scale(VersionRuntime& vr) {
    if (variant_ != Variant::BaselineStatic) return;
    if (vr.reactive_pending || vr.queue.empty()) return;
    for (const auto& up : vr.instances)
      if (is_idle(*up)) return;
    std::int64_t from = static_cast<std::int64_t>(vr.instances.size());
    InstanceState* inst = create_instance(vr, "reactive");
    if (!inst) return;
    vr.reactive_pending = true;
    auto& rec = log("scale_action");
    rec.version = vr.version.id();
    rec.detail["source"] = "reactive";
    rec.detail["from"] = from;
    rec.detail["to"] = from + 1;
  }

  void start_execution(Request& req, VersionRuntime& vr, InstanceState& inst) {
    const auto& profile = profiles_.at(req.function);
    std::int64_t demand_mc =
        cpu_from_mem(profile.mem_required(req.payload),
                     cfg_.predictor.cpu_per_mib);
    ExecOutcome ex = execute_model(
        profile, req.payload, vr.version,
        inst.active_cpu_demand_mc + demand_mc, cfg_.latency,
        cfg_.function_timeout_s);
    inst.active_cpu_demand_mc += demand_mc;

    req.state = RequestState::Executing;
    req.exec_start = now_;
    req.instance_id = inst.id();
    req.exec_mem_mib = vr.version.mem_mib;
    vr.served_last_interval = true;

    SimTime dur = seconds_to_us(ex.duration_s);
    executing_[req.id] =
        ExecInfo{inst.id(), inst.epoch, demand_mc, now_, dur, ex.oom};

    auto& rec = log("exec_start");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.version = vr.version.id();
    rec.detail["instance"] = inst.id();
    rec.detail["sharing_factor"] = ex.sharing_factor;

    schedule(now_ + dur, EvKind::ExecutionDone, req.id, inst.id(),
             vr.version.id(), inst.epoch);
  }

  void on_execution_done(Request& req, const Event& ev) {
    auto it = executing_.find(req.id);
    if (it == executing_.end()) return;  // stale (instance already failed)
    const ExecInfo info = it->second;
    if (info.instance_id != ev.a || info.instance_epoch != ev.epoch) return;

    VersionRuntime* vr = nullptr;
    InstanceState* inst = find_instance(ev.b, ev.a, &vr);
    if (!inst || inst->epoch != ev.epoch) return;

    executing_.erase(it);
    if (info.oom) {
      finish_executed(req, info, "failed_oom", info.duration_us);
      fail_instance(*vr, *inst, FailureReason::OomKilled);
    } else {
      inst->active_cpu_demand_mc -= info.cpu_demand_mc;
      inst->release(now_);
      finish_executed(req, info, "succeeded", info.duration_us);
      if (inst->draining() && inst->active_connections() == 0) {
        remove_instance(*vr, inst->id(), "scale_down");
      } else {
        schedule_expiry(*inst);
      }
    }
  }

  void fail_instance(VersionRuntime& vr, InstanceState& inst,
                     FailureReason reason) {
    inst.mark_failed(reason);
    auto& rec = log("instance_failed");
    rec.version = vr.version.id();
    rec.detail["instance"] = inst.id();
    rec.detail["reason"] = to_string(reason);

    // Cascading terminations: other in-flight requests on this instance
    // fail now and are billed for their elapsed time.
    std::vector<std::uint64_t> victims;
    for (const auto& [rid, info] : executing_) {
      if (info.instance_id == inst.id()) victims.push_back(rid);
    }
    for (auto rid : victims) {
      ExecInfo info = executing_.at(rid);
      executing_.erase(rid);
      finish_executed(requests_.at(rid), info, "failed_oom",
                      now_ - info.started);
    }
    if (!use_redundancy()) {
      // Without the redundancy scanner nothing replaces a failed replica;
      // model the platform reclaiming it right away.
      remove_instance(vr, inst.id(), "failed");
    }
  }

  void finish_executed(Request& req, const ExecInfo& info,
                       const char* outcome, SimTime exec_elapsed_us) {
    req.state = outcome == std::string("succeeded") ? RequestState::Succeeded
                                                    : RequestState::FailedOom;
    req.finished_at = now_;
    req.billed_ms = (exec_elapsed_us + kUsPerMs - 1) / kUsPerMs;
    outstanding_--;

    result_.streaming_cost.add_execution(
        req.exec_mem_mib, req.billed_ms,
        Cost::rate_pico(cfg_.pricing.price_per_gb_s));

    auto& rec = log("exec_done");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.version = requests_.at(req.id).instance_id.empty()
                      ? ""
                      : info.instance_id.substr(0, info.instance_id.find('#'));
    rec.detail["outcome"] = outcome;
    rec.detail["billed_ms"] = req.billed_ms;
    rec.detail["mem_mib"] = req.exec_mem_mib;
    rec.detail["duration_us"] = exec_elapsed_us;
    rec.detail["e2e_us"] = now_ - req.arrival;
  }

  // `version_id` names the queue involved, when there was one.
  void finish_dropped(Request& req, const char* reason,
                      const std::string& version_id = "") {
    req.state = reason == std::string("queue_full")
                    ? RequestState::DroppedQueueFull
                    : RequestState::DroppedRetriesExhausted;
    req.finished_at = now_;
    outstanding_--;
    auto& rec = log("dropped");
    rec.request_id = static_cast<std::int64_t>(req.id);
    rec.version = version_id;
    rec.detail["reason"] = reason;
  }

  void on_cold_start_done(const Event& ev) {
    VersionRuntime* vr = nullptr;
    InstanceState* inst = find_instance(ev.b, ev.a, &vr);
    if (!inst || inst->phase() != InstancePhase::ColdStarting) return;
    inst->mark_ready(now_);
    vr->reactive_pending = false;
    auto& rec = log("instance_ready");
    rec.version = ev.b;
    rec.detail["instance"] = ev.a;

    if (auto it = parked_.find(ev.a); it != parked_.end()) {
      std::uint64_t rid = it->second;
      parked_.erase(it);
      Request& req = requests_.at(rid);
      if (!is_terminal(req.state) && inst->try_claim()) {
        auto& crec = log("claimed");
        crec.request_id = static_cast<std::int64_t>(rid);
        crec.version = ev.b;
        crec.detail["instance"] = ev.a;
        start_execution(req, *vr, *inst);
      }
    }
    schedule_expiry(*inst);
  }

  void schedule_expiry(InstanceState& inst) {
    schedule(inst.last_used + seconds_to_us(inst.version().keep_alive_s) +
                 kUsPerMs,
             EvKind::InstanceExpired, 0, inst.id(), inst.version().id());
  }

  void on_instance_expired(const Event& ev) {
    VersionRuntime* vr = nullptr;
    InstanceState* inst = find_instance(ev.b, ev.a, &vr);
    if (!inst) return;
    if (inst->phase() != InstancePhase::Ready) return;
    if (inst->active_connections() > 0) return;  // rescheduled on release
    if (parked_.count(ev.a)) return;
    SimTime keep_alive_us = seconds_to_us(inst->version().keep_alive_s);
    if (now_ - inst->last_used <= keep_alive_us) {
      schedule(inst->last_used + keep_alive_us + kUsPerMs,
               EvKind::InstanceExpired, 0, ev.a, ev.b);
      return;
    }
    std::int64_t floor =
        variant_ == Variant::BaselineStatic ? 1 : vr->lower_bound;
    if (static_cast<std::int64_t>(vr->instances.size()) <= floor) return;
    remove_instance(*vr, ev.a, "expired");
  }

  void on_queue_retry_tick(const Event& ev) {
    auto it = versions_.find(ev.a);
    if (it == versions_.end()) return;
    auto& vr = it->second;
    vr.tick_scheduled = false;

    std::vector<InstanceState*> insts;
    for (auto& up : vr.instances) insts.push_back(up.get());
    auto results = vr.queue.retry_tick(
        [&]() { return claim_idle(insts, cfg_.queue.claim_retries); },
        cfg_.queue.max_retries);
    for (const auto& tr : results) {
      Request& req = requests_.at(tr.request_id);
      queue_owner_.erase(tr.request_id);
      if (tr.result.outcome == ClaimOutcome::Claimed) {
        auto& rec = log("claimed");
        rec.request_id = static_cast<std::int64_t>(tr.request_id);
        rec.version = vr.version.id();
        rec.detail["instance"] = tr.result.instance->id();
        start_execution(req, vr, *tr.result.instance);
      } else {
        finish_dropped(req, "retries_exhausted", vr.version.id());
      }
    }
    if (!vr.queue.empty()) {
      vr.tick_scheduled = true;
      schedule(now_ + seconds_to_us(cfg_.queue.retry_interval_s),
               EvKind::QueueRetryTick, 0, vr.version.id());
    }
    maybe_reactive_scale(vr);
  }

  // ---- periodic control loops ---------------------------------------------

  void on_redundancy_tick() {
    std::vector<VersionHealth> health;
    for (auto& [key, vr] : versions_) {
      if (vr.instances.empty()) continue;
      VersionHealth h;
      h.version = vr.version;
      h.current = static_cast<std::int64_t>(vr.instances.size());
      for (const auto& up : vr.instances) {
        if (up->phase() == InstancePhase::Failed &&
            cfg_.redundancy.failure_states.count(up->failure_reason()))
          h.failing++;
      }
      health.push_back(std::move(h));
    }
    auto actions =
        scan_and_scale(health, now_, redundancy_last_action_, cfg_.redundancy);
    for (const auto& act : actions) {
      auto& rec = log("scale_action");
      rec.version = act.version.id();
      rec.detail["source"] = "redundancy";
      rec.detail["from"] = act.from;
      rec.detail["to"] = act.to;
      auto& vr = versions_.at(act.version.id());
      // Replace failed replicas once counted, then add the compensation.
      std::vector<std::string> failed_ids;
      for (const auto& up : vr.instances)
        if (up->phase() == InstancePhase::Failed)
          failed_ids.push_back(up->id());
      for (const auto& id : failed_ids)
        remove_instance(vr, id, "failed_replaced");
      std::int64_t want =
          act.to - static_cast<std::int64_t>(vr.instances.size());
      for (std::int64_t i = 0; i < want; ++i) {
        if (!create_instance(vr, "redundancy")) break;
      }
    }
    if (work_remaining())
      schedule(now_ + seconds_to_us(cfg_.redundancy.check_interval_s),
               EvKind::RedundancyTick);
  }

  DemandSnapshot take_snapshot() {
    DemandSnapshot snap;
    snap.capacity = cfg_.cluster;
    for (const auto& [key, acc] : demand_) {
      DemandSnapshot::ClassObservation obs;
      obs.function = key.first;
      obs.required.mem_mib = key.second;
      obs.required.cpu_mc = cpu_from_mem(key.second, cfg_.predictor.cpu_per_mib);
      obs.demand = acc.count;
      obs.rep_payload = acc.count ? acc.payload_sum / acc.count : 0;
      snap.classes.push_back(std::move(obs));
    }
    demand_.clear();
    for (auto& [key, vr] : versions_) {
      if (vr.instances.empty() && !vr.served_last_interval) continue;
      DemandSnapshot::LiveVersion lv;
      lv.version = vr.version;
      lv.count = static_cast<std::int64_t>(vr.instances.size());
      for (const auto& up : vr.instances)
        if (up->active_connections() > 0) lv.busy++;
      lv.served_last_interval = vr.served_last_interval;
      vr.served_last_interval = false;
      if (lv.served_last_interval) hot_versions_.insert(key);
      snap.live.push_back(std::move(lv));
    }
    return snap;
  }

  void on_optimizer_tick() {
    hot_versions_.clear();
    DemandSnapshot snap = take_snapshot();
    std::vector<FunctionProfile> plist;
    for (const auto& [n, p] : profiles_) plist.push_back(p);
    PricingView pricing{cfg_.pricing.price_per_gb_s,
                        cfg_.pricing.price_per_request};
    IlpModel model =
        build_model(snap, plist, pricing, cfg_.optimizer,
                    cfg_.concurrency_limit, cfg_.keep_alive_s,
                    cfg_.max_instances_per_version);
    OptimizerPlan plan = solve(model, cfg_.optimizer.budget_s);

    auto& rec = log("optimizer_tick");
    rec.detail["classes"] = model.classes.size();
    rec.detail["versions"] = model.versions.size();
    rec.detail["status"] = plan.status == SolveStatus::Optimal ? "optimal"
                           : plan.status == SolveStatus::FeasibleWithGap
                               ? "feasible_with_gap"
                               : "infeasible";
    if (plan.status != SolveStatus::Infeasible) {
      rec.detail["objective"] = plan.objective;
      rec.detail["cost_term"] = plan.cost_term;
      rec.detail["penalty_term"] = plan.penalty_term;
      rec.detail["utility_term"] = plan.utility_term;
    } else {
      rec.detail["reason"] = plan.infeasible_reason;
    }

    if (cfg_.dump_plans) result_.plan_dumps.push_back(dump_plan(model, plan));

    if (plan.status != SolveStatus::Infeasible) {
      pending_plans_[++plan_counter_] = {std::move(model), std::move(plan)};
      schedule(now_ + seconds_to_us(cfg_.optimizer.solve_latency_s),
               EvKind::OptimizerApply, plan_counter_);
    }
    if (work_remaining())
      schedule(now_ + seconds_to_us(cfg_.optimizer.interval_s),
               EvKind::OptimizerTick);
  }

  static std::string dump_plan(const IlpModel& model,
                               const OptimizerPlan& plan) {
    nlohmann::ordered_json j;
    j["status"] = plan.status == SolveStatus::Optimal ? "optimal"
                  : plan.status == SolveStatus::FeasibleWithGap
                      ? "feasible_with_gap"
                      : "infeasible";
    j["objective"] = plan.objective;
    j["cost_term"] = plan.cost_term;
    j["penalty_term"] = plan.penalty_term;
    j["utility_term"] = plan.utility_term;
    auto versions = nlohmann::ordered_json::array();
    for (size_t v = 0; v < model.versions.size(); ++v) {
      const auto& mv = model.versions[v];
      nlohmann::ordered_json mj;
      mj["id"] = mv.version.id();
      mj["cost_coeff"] = mv.cost_coeff;
      mj["cpu_mc"] = mv.cpu_mc;
      mj["mem_mib"] = mv.mem_mib;
      mj["kappa"] = mv.kappa;
      mj["lower"] = mv.lower;
      mj["upper"] = mv.upper;
      if (!plan.x.empty()) mj["x"] = plan.x[v];
      versions.push_back(std::move(mj));
    }
    j["versions"] = std::move(versions);
    auto classes = nlohmann::ordered_json::array();
    for (size_t r = 0; r < model.classes.size(); ++r) {
      const auto& c = model.classes[r];
      nlohmann::ordered_json cj;
      cj["id"] = c.id;
      cj["demand"] = c.demand;
      cj["penalty_coeff"] = c.penalty_coeff;
      cj["utility_coeff"] = c.utility_coeff;
      if (!plan.y.empty()) cj["y"] = plan.y[r];
      classes.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes);
    return j.dump();
  }

  void on_optimizer_apply(std::uint64_t plan_id) {
    auto it = pending_plans_.find(plan_id);
    if (it == pending_plans_.end()) return;
    IlpModel model = std::move(it->second.first);
    OptimizerPlan plan = std::move(it->second.second);
    pending_plans_.erase(it);

    std::vector<DemandSnapshot::LiveVersion> live;
    for (auto& [key, vr] : versions_) {
      DemandSnapshot::LiveVersion lv;
      lv.version = vr.version;
      lv.count = static_cast<std::int64_t>(vr.instances.size());
      for (const auto& up : vr.instances)
        if (up->active_connections() > 0) lv.busy++;
      live.push_back(std::move(lv));
    }
    // Scale-downs are suppressed on versions inside their redundancy
    // cooldown and on versions that served traffic last interval: hot
    // versions shrink through keep-alive expiry, not reconciliation, so
    // warm capacity is not torn down while demand for it persists.
    std::vector<std::string> suppressed(hot_versions_.begin(),
                                        hot_versions_.end());
    SimTime cooldown = seconds_to_us(cfg_.redundancy.cooldown_s);
    for (const auto& [vid, t] : redundancy_last_action_)
      if (now_ - t < cooldown) suppressed.push_back(vid);

    auto actions = reconcile(model, plan, live, suppressed);
    for (const auto& act : actions) {
      auto& rec = log("scale_action");
      rec.version = act.version.id();
      rec.detail["source"] = "optimizer";
      rec.detail["from"] = act.from;
      rec.detail["to"] = act.to;
      auto& vr = ensure_version(act.version);
      if (act.to > act.from) {
        for (std::int64_t i = act.from; i < act.to; ++i)
          if (!create_instance(vr, "optimizer")) break;
      } else {
        scale_down(vr, act.to);
      }
    }
    // Persist lower bounds so idle expiry honours no-scale-to-zero.
    for (size_t v = 0; v < model.versions.size(); ++v) {
      auto vit = versions_.find(model.versions[v].version.id());
      if (vit != versions_.end())
        vit->second.lower_bound = model.versions[v].lower;
    }
  }

  void scale_down(VersionRuntime& vr, std::int64_t target) {
    // Remove idle instances first (longest idle first); busy ones are only
    // marked draining and leave once their connections finish.
    std::int64_t excess =
        static_cast<std::int64_t>(vr.instances.size()) - target;
    if (excess <= 0) return;
    std::vector<InstanceState*> idle;
    for (auto& up : vr.instances) {
      if (up->phase() == InstancePhase::Ready &&
          up->active_connections() == 0 && !parked_.count(up->id()))
        idle.push_back(up.get());
    }
    std::sort(idle.begin(), idle.end(),
              [](const InstanceState* a, const InstanceState* b) {
                if (a->last_used != b->last_used)
                  return a->last_used < b->last_used;
                return a->id() < b->id();
              });
    for (InstanceState* inst : idle) {
      if (excess <= 0) break;
      remove_instance(vr, inst->id(), "scale_down");
      excess--;
    }
    for (auto& up : vr.instances) {
      if (excess <= 0) break;
      if (up->phase() == InstancePhase::Ready && !up->draining() &&
          up->active_connections() > 0) {
        up->set_draining(true);
        excess--;
      }
    }
  }

  void on_predictor_refresh() {
    bool cleared = predictor_.refresh(now_);
    auto& rec = log("predictor_refresh");
    rec.detail["cleared"] = cleared;
    if (work_remaining())
      schedule(now_ + seconds_to_us(cfg_.predictor.refresh_interval_s),
               EvKind::PredictorRefresh);
  }

  // ---- run ----------------------------------------------------------------

  void write_header() {
    auto& rec = log("run_header");
    rec.detail["variant"] = to_string(variant_);
    rec.detail["seed"] = seed_;
    nlohmann::ordered_json pj;
    pj["price_per_gb_s"] = cfg_.pricing.price_per_gb_s;
    pj["price_per_request"] = cfg_.pricing.price_per_request;
    rec.detail["pricing"] = std::move(pj);
    auto fns = nlohmann::ordered_json::array();
    for (const auto& [n, p] : profiles_) {
      nlohmann::ordered_json fj;
      fj["name"] = n;
      fj["slo_seconds"] = p.slo_seconds;
      fns.push_back(std::move(fj));
    }
    rec.detail["functions"] = std::move(fns);
  }

  void check_invariants() const {
    for (const auto& [key, vr] : versions_) {
      for (const auto& up : vr.instances) {
        int c = up->active_connections();
        if (c < 0 || c > up->version().concurrency_limit)
          throw std::logic_error("connection counter out of [0, M_p] on " +
                                 up->id());
        if (up->phase() == InstancePhase::ColdStarting && c != 0)
          throw std::logic_error("cold-starting instance has connections");
      }
      if (vr.queue.size() >
          static_cast<std::size_t>(std::max(0, cfg_.queue.capacity)))
        throw std::logic_error("queue length exceeds K");
    }
    if (used_cpu() > cfg_.cluster.total_cpu_mc ||
        used_mem() > cfg_.cluster.total_mem_mib)
      throw std::logic_error("cluster capacity exceeded");
  }

 public:
  RunResult run_impl() {
    write_header();

    if (variant_ == Variant::BaselineStatic) {
      for (const auto& [name, p] : profiles_) {
        FunctionVersion v;
        v.function = name;
        v.mem_mib = cfg_.baseline_mem_mib;
        v.cpu_mc =
            cpu_from_mem(cfg_.baseline_mem_mib, cfg_.predictor.cpu_per_mib);
        auto& vr = ensure_version(v);
        std::string id = v.id() + "#" + std::to_string(++vr.instance_counter);
        vr.instances.push_back(std::make_unique<InstanceState>(id, vr.version));
        vr.instances.back()->mark_ready(0);
        auto& rec = log("instance_ready");
        rec.version = v.id();
        rec.detail["instance"] = id;
        rec.detail["initial"] = true;
      }
    }

    arrivals_pending_ = static_cast<std::int64_t>(workload_.size());
    for (const auto& r : workload_)
      schedule(r.arrival, EvKind::Arrival, r.id);
    if (use_redundancy())
      schedule(seconds_to_us(cfg_.redundancy.check_interval_s),
               EvKind::RedundancyTick);
    if (use_optimizer())
      schedule(seconds_to_us(cfg_.optimizer.interval_s), EvKind::OptimizerTick);
    if (use_predictor())
      schedule(seconds_to_us(cfg_.predictor.refresh_interval_s),
               EvKind::PredictorRefresh);

    while (!events_.empty()) {
      Event ev = events_.top();
      events_.pop();
      now_ = ev.at;
      switch (ev.kind) {
        case EvKind::Arrival:
          on_arrival(requests_.at(ev.req_id));
          break;
        case EvKind::PredictionDone:
          on_prediction_done(requests_.at(ev.req_id));
          break;
        case EvKind::RoutingDone:
          on_routing_done(requests_.at(ev.req_id));
          break;
        case EvKind::ExecutionDone:
          on_execution_done(requests_.at(ev.req_id), ev);
          break;
        case EvKind::ColdStartDone:
          on_cold_start_done(ev);
          break;
        case EvKind::InstanceExpired:
          on_instance_expired(ev);
          break;
        case EvKind::QueueRetryTick:
          on_queue_retry_tick(ev);
          break;
        case EvKind::RedundancyTick:
          on_redundancy_tick();
          break;
        case EvKind::OptimizerTick:
          on_optimizer_tick();
          break;
        case EvKind::OptimizerApply:
          on_optimizer_apply(ev.req_id);
          break;
        case EvKind::PredictorRefresh:
          on_predictor_refresh();
          break;
      }
      check_invariants();
    }

    // Conservation: every request must have reached exactly one terminal
    // state.
    std::int64_t terminal = 0;
    for (const auto& [id, r] : requests_)
      if (is_terminal(r.state)) terminal++;
    if (terminal != static_cast<std::int64_t>(workload_.size()))
      throw std::logic_error("request conservation violated: " +
                             std::to_string(terminal) + " terminal of " +
                             std::to_string(workload_.size()));

    result_.report = replay_metrics(result_.log.records());
    return std::move(result_);
  }

 private:
  EngineConfig cfg_;
  Variant variant_;
  std::uint64_t seed_;
  std::mt19937_64 cs_rng_;
  std::mt19937_64 route_rng_;
  Predictor predictor_;

  std::map<std::string, FunctionProfile> profiles_;
  std::vector<Request> workload_;
  std::map<std::uint64_t, Request> requests_;
  std::map<std::string, VersionRuntime> versions_;
  std::map<std::string, std::vector<std::string>> function_versions_;
  std::map<std::string, std::uint64_t> parked_;  // instance -> request
  std::map<std::uint64_t, ExecInfo> executing_;
  std::map<std::uint64_t, std::string> queue_owner_;
  std::map<std::pair<std::string, std::int64_t>, DemandAccumulator> demand_;
  std::map<std::string, SimTime> redundancy_last_action_;
  std::set<std::string> hot_versions_;
  std::map<std::uint64_t, std::pair<IlpModel, OptimizerPlan>> pending_plans_;
  std::uint64_t plan_counter_ = 0;

  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t event_seq_ = 0;
  SimTime now_ = 0;
  std::int64_t outstanding_ = 0;
  std::int64_t arrivals_pending_ = 0;
  RunResult result_;
};

}  // namespace

RunResult run(const EngineConfig& cfg,
              const std::vector<FunctionProfile>& profiles,
              const std::vector<Request>& workload, Variant variant,
              std::uint64_t seed) {
  Engine engine(cfg, profiles, workload, variant, seed);
  return engine.run_impl();
}

}  // namespace saarthi

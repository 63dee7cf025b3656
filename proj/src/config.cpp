#include "saarthi/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace saarthi {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Pulls a field if present; complains about unknown keys at the end.
struct Section {
  const json& j;
  std::string origin;
  mutable std::set<std::string> seen;

  Section(const json& j, std::string origin)
      : j(j), origin(std::move(origin)) {
    if (!j.is_object()) fail(this->origin, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) const {
    seen.insert(key);
    if (auto it = j.find(key); it != j.end()) {
      try {
        out = it->get<T>();
      } catch (const json::exception& e) {
        fail(origin, std::string("bad value for '") + key + "': " + e.what());
      }
    }
  }

  bool has(const char* key) const {
    seen.insert(key);
    return j.contains(key);
  }

  void finish() const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!seen.count(it.key()))
        fail(origin, "unknown key '" + it.key() + "'");
    }
  }
};

PiecewiseLinear parse_knots(const json& j, const std::string& origin,
                            const char* key) {
  if (!j.is_array() || j.empty())
    fail(origin, std::string(key) + " must be a non-empty array of [x, y]");
  std::vector<std::pair<std::int64_t, double>> knots;
  for (const auto& k : j) {
    if (!k.is_array() || k.size() != 2)
      fail(origin, std::string(key) + " entries must be [x, y] pairs");
    knots.emplace_back(k[0].get<std::int64_t>(), k[1].get<double>());
  }
  try {
    return PiecewiseLinear(std::move(knots));
  } catch (const std::exception& e) {
    fail(origin, std::string(key) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) throw std::invalid_argument("empty seed entry");
    auto dots = part.find("..");
    std::uint64_t lo = 0, hi = 0;
    try {
      if (dots == std::string::npos) {
        lo = hi = std::stoull(part);
      } else {
        lo = std::stoull(part.substr(0, dots));
        hi = std::stoull(part.substr(dots + 2));
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad seed spec '" + part + "'");
    }
    if (hi < lo)
      throw std::invalid_argument("seed range " + part + " is reversed");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("seed spec is empty");
  return out;
}

std::vector<Variant> parse_variant_list(const std::string& spec) {
  std::vector<Variant> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(parse_variant(part));
  }
  if (out.empty()) throw std::invalid_argument("variant list is empty");
  return out;
}

FunctionProfile parse_profile(const std::string& text,
                              const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("parse error: ") + e.what());
  }
  Section s(j, origin);
  FunctionProfile p;
  if (!s.has("name")) fail(origin, "profile missing 'name'");
  s.get("name", p.name);
  s.get("slo_seconds", p.slo_seconds);
  if (!s.has("payload_min") || !s.has("payload_max"))
    fail(origin, "profile missing payload_min/payload_max");
  s.get("payload_min", p.payload_min);
  s.get("payload_max", p.payload_max);
  if (!s.has("mem_req_knots")) fail(origin, "profile missing 'mem_req_knots'");
  p.mem_req = parse_knots(j.at("mem_req_knots"), origin, "mem_req_knots");
  s.seen.insert("mem_req_knots");
  if (!s.has("time_knots")) fail(origin, "profile missing 'time_knots'");
  p.base_time = parse_knots(j.at("time_knots"), origin, "time_knots");
  s.seen.insert("time_knots");
  s.get("time_ref_mem_mib", p.time_ref_mem_mib);
  s.get("mem_speed_exponent", p.mem_speed_exponent);
  s.finish();
  try {
    p.validate();
  } catch (const std::exception& e) {
    fail(origin, e.what());
  }
  return p;
}

FunctionProfile load_profile(const std::string& path) {
  return parse_profile(slurp(path), path);
}

namespace {

void parse_engine_sections(const json& j, const std::string& origin,
                           EngineConfig& e, Section& top) {
  if (top.has("cluster")) {
    Section s(j.at("cluster"), origin + ".cluster");
    s.get("total_cpu_mc", e.cluster.total_cpu_mc);
    s.get("total_mem_mib", e.cluster.total_mem_mib);
    s.finish();
  }
  if (top.has("balancer")) {
    Section s(j.at("balancer"), origin + ".balancer");
    s.get("tolerance", e.balancer.tolerance);
    std::string mode;
    s.get("explore_mode", mode);
    if (mode == "window")
      e.balancer.explore_mode = ExploreMode::Window;
    else if (mode == "bernoulli" || mode.empty())
      e.balancer.explore_mode = ExploreMode::Bernoulli;
    else
      fail(origin, "balancer.explore_mode must be 'window' or 'bernoulli'");
    s.get("explore_p", e.balancer.explore_p);
    s.get("balancer_latency_s", e.balancer.balancer_latency_s);
    s.get("max_versions", e.balancer.max_versions);
    s.finish();
  }
  if (top.has("queue")) {
    Section s(j.at("queue"), origin + ".queue");
    s.get("capacity", e.queue.capacity);
    s.get("retry_interval_s", e.queue.retry_interval_s);
    s.get("max_retries", e.queue.max_retries);
    s.get("claim_retries", e.queue.claim_retries);
    s.finish();
  }
  if (top.has("optimizer")) {
    Section s(j.at("optimizer"), origin + ".optimizer");
    s.get("alpha", e.optimizer.alpha);
    s.get("beta", e.optimizer.beta);
    s.get("gamma", e.optimizer.gamma);
    s.get("interval_s", e.optimizer.interval_s);
    s.get("solve_latency_s", e.optimizer.solve_latency_s);
    s.get("kappa_per_minute", e.optimizer.kappa_per_minute);
    s.get("budget_s", e.optimizer.budget_s);
    s.get("cold_start_term", e.optimizer.cold_start_term);
    s.get("cs_penalty", e.optimizer.cs_penalty);
    s.finish();
  }
  if (top.has("redundancy")) {
    Section s(j.at("redundancy"), origin + ".redundancy");
    s.get("check_interval_s", e.redundancy.check_interval_s);
    s.get("cooldown_s", e.redundancy.cooldown_s);
    s.finish();
  }
  if (top.has("predictor")) {
    Section s(j.at("predictor"), origin + ".predictor");
    std::string kind;
    s.get("kind", kind);
    if (kind == "noisy_oracle")
      e.predictor.kind = PredictorKind::NoisyOracle;
    else if (kind == "table_lookup" || kind.empty())
      e.predictor.kind = PredictorKind::TableLookup;
    else
      fail(origin, "predictor.kind must be 'table_lookup' or 'noisy_oracle'");
    s.get("refresh_interval_s", e.predictor.refresh_interval_s);
    s.get("unique_latency_s", e.predictor.unique_latency_s);
    s.get("cached_latency_s", e.predictor.cached_latency_s);
    s.get("noise_pct", e.predictor.noise_pct);
    s.get("quantize_step_mib", e.predictor.quantize_step_mib);
    s.get("cpu_per_mib", e.predictor.cpu_per_mib);
    s.finish();
  }
  if (top.has("pricing")) {
    Section s(j.at("pricing"), origin + ".pricing");
    s.get("price_per_gb_s", e.pricing.price_per_gb_s);
    s.get("price_per_request", e.pricing.price_per_request);
    s.finish();
  }
  if (top.has("latency")) {
    Section s(j.at("latency"), origin + ".latency");
    s.get("cold_start_min_s", e.latency.cold_start_min_s);
    s.get("cold_start_max_s", e.latency.cold_start_max_s);
    s.get("apply_action_s", e.latency.apply_action_s);
    s.get("oom_fraction", e.latency.oom_fraction);
    s.finish();
  }
  if (top.has("engine")) {
    Section s(j.at("engine"), origin + ".engine");
    s.get("concurrency_limit", e.concurrency_limit);
    s.get("keep_alive_s", e.keep_alive_s);
    s.get("max_instances_per_version", e.max_instances_per_version);
    s.get("baseline_mem_mib", e.baseline_mem_mib);
    s.get("function_timeout_s", e.function_timeout_s);
    s.get("dump_plans", e.dump_plans);
    s.finish();
  }
}

WorkloadSpec parse_workload(const json& j, const std::string& origin) {
  WorkloadSpec w;
  Section s(j, origin);
  s.get("trace", w.trace_path);
  s.get("clock_scale", w.clock_scale);
  if (s.has("synthetic")) {
    const auto& arr = j.at("synthetic");
    if (!arr.is_array()) fail(origin, "workload.synthetic must be an array");
    for (const auto& ej : arr) {
      Section es(ej, origin + ".synthetic[]");
      WorkloadSpec::SyntheticEntry entry;
      if (!es.has("function")) fail(origin, "synthetic entry missing 'function'");
      es.get("function", entry.function);
      es.get("rate_lambda", entry.spec.rate_lambda);
      es.get("payload_mu", entry.spec.payload_mu);
      es.get("payload_sigma", entry.spec.payload_sigma);
      es.get("duration_s", entry.spec.duration_s);
      es.finish();
      w.synthetic.push_back(std::move(entry));
    }
  }
  s.finish();
  return w;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(j, origin);
  top.get("out_dir", cfg.out_dir);
  if (top.has("variants")) {
    const auto& v = j.at("variants");
    cfg.variants.clear();
    if (v.is_string()) {
      cfg.variants = parse_variant_list(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) cfg.variants.push_back(parse_variant(e.get<std::string>()));
    } else {
      fail(origin, "variants must be a string or array of strings");
    }
  }
  if (top.has("seeds")) {
    const auto& v = j.at("seeds");
    cfg.seeds.clear();
    if (v.is_string()) {
      cfg.seeds = parse_seed_spec(v.get<std::string>());
    } else if (v.is_number_unsigned() || v.is_number_integer()) {
      cfg.seeds.push_back(v.get<std::uint64_t>());
    } else if (v.is_array()) {
      for (const auto& e : v) cfg.seeds.push_back(e.get<std::uint64_t>());
    } else {
      fail(origin, "seeds must be a string, number, or array");
    }
  }
  top.get("profiles", cfg.profile_paths);
  if (top.has("workload"))
    cfg.workload = parse_workload(j.at("workload"), origin + ".workload");
  parse_engine_sections(j, origin, cfg.engine, top);
  top.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(slurp(path), path);
}

void apply_env_overrides(
    ExperimentConfig& cfg,
    const std::function<const char*(const char*)>& getenv_fn) {
  auto get = [&](const char* name) -> const char* {
    return getenv_fn ? getenv_fn(name) : std::getenv(name);
  };
  auto as_double = [](const char* name, const char* v) {
    try {
      return std::stod(v);
    } catch (...) {
      throw std::runtime_error(std::string(name) + ": bad numeric value");
    }
  };
  auto as_int = [](const char* name, const char* v) -> std::int64_t {
    try {
      return std::stoll(v);
    } catch (...) {
      throw std::runtime_error(std::string(name) + ": bad integer value");
    }
  };

  if (const char* v = get("SAARTHI_OUT")) cfg.out_dir = v;
  if (const char* v = get("SAARTHI_VARIANT"))
    cfg.variants = parse_variant_list(v);
  if (const char* v = get("SAARTHI_SEED")) cfg.seeds = parse_seed_spec(v);
  if (const char* v = get("SAARTHI_EXPLORE_P"))
    cfg.engine.balancer.explore_p = as_double("SAARTHI_EXPLORE_P", v);
  if (const char* v = get("SAARTHI_EXPLORE_MODE")) {
    std::string m = v;
    if (m == "window")
      cfg.engine.balancer.explore_mode = ExploreMode::Window;
    else if (m == "bernoulli")
      cfg.engine.balancer.explore_mode = ExploreMode::Bernoulli;
    else
      throw std::runtime_error("SAARTHI_EXPLORE_MODE: must be window|bernoulli");
  }
  if (const char* v = get("SAARTHI_BASELINE_MEM_MIB"))
    cfg.engine.baseline_mem_mib = as_int("SAARTHI_BASELINE_MEM_MIB", v);
  if (const char* v = get("SAARTHI_QUEUE_CAPACITY"))
    cfg.engine.queue.capacity =
        static_cast<int>(as_int("SAARTHI_QUEUE_CAPACITY", v));
  if (const char* v = get("SAARTHI_MAX_RETRIES"))
    cfg.engine.queue.max_retries =
        static_cast<int>(as_int("SAARTHI_MAX_RETRIES", v));
  if (const char* v = get("SAARTHI_OPT_INTERVAL_S"))
    cfg.engine.optimizer.interval_s = as_double("SAARTHI_OPT_INTERVAL_S", v);
  if (const char* v = get("SAARTHI_OPT_BUDGET_S"))
    cfg.engine.optimizer.budget_s = as_double("SAARTHI_OPT_BUDGET_S", v);
  if (const char* v = get("SAARTHI_KEEP_ALIVE_S"))
    cfg.engine.keep_alive_s = as_double("SAARTHI_KEEP_ALIVE_S", v);
  if (const char* v = get("SAARTHI_PRICE_PER_GB_S"))
    cfg.engine.pricing.price_per_gb_s = as_double("SAARTHI_PRICE_PER_GB_S", v);
  if (const char* v = get("SAARTHI_PRICE_PER_REQUEST"))
    cfg.engine.pricing.price_per_request =
        as_double("SAARTHI_PRICE_PER_REQUEST", v);
  if (const char* v = get("SAARTHI_DUMP_PLANS"))
    cfg.engine.dump_plans = std::string(v) == "1" || std::string(v) == "true";
}

void validate_config(const ExperimentConfig& cfg,
                     const std::vector<FunctionProfile>& profiles) {
  auto bad = [](const std::string& what) {
    throw std::runtime_error("config validation: " + what);
  };
  const auto& e = cfg.engine;
  if (cfg.variants.empty()) bad("no variants selected");
  if (cfg.seeds.empty()) bad("no seeds selected");
  if (e.cluster.total_cpu_mc <= 0 || e.cluster.total_mem_mib <= 0)
    bad("cluster capacity must be positive");
  if (e.balancer.explore_p < 0.0 || e.balancer.explore_p > 1.0)
    bad("balancer.explore_p must lie in [0, 1]");
  if (e.balancer.tolerance < 0.0) bad("balancer.tolerance must be >= 0");
  if (e.balancer.max_versions <= 0) bad("balancer.max_versions must be > 0");
  if (e.queue.capacity < 0) bad("queue.capacity must be >= 0");
  if (e.queue.retry_interval_s <= 0) bad("queue.retry_interval_s must be > 0");
  if (e.queue.max_retries < 0) bad("queue.max_retries must be >= 0");
  if (e.queue.claim_retries < 1) bad("queue.claim_retries must be >= 1");
  if (e.optimizer.alpha < 0 || e.optimizer.beta < 0 || e.optimizer.gamma < 0)
    bad("optimizer weights must be >= 0");
  if (e.optimizer.interval_s <= 0) bad("optimizer.interval_s must be > 0");
  if (e.optimizer.kappa_per_minute <= 0)
    bad("optimizer.kappa_per_minute must be > 0");
  if (e.redundancy.check_interval_s <= 0)
    bad("redundancy.check_interval_s must be > 0");
  if (e.redundancy.cooldown_s < 0) bad("redundancy.cooldown_s must be >= 0");
  if (e.predictor.quantize_step_mib <= 0)
    bad("predictor.quantize_step_mib must be > 0");
  if (e.predictor.cpu_per_mib <= 0) bad("predictor.cpu_per_mib must be > 0");
  if (e.predictor.noise_pct < 0) bad("predictor.noise_pct must be >= 0");
  if (e.pricing.price_per_gb_s < 0 || e.pricing.price_per_request < 0)
    bad("pricing rates must be >= 0");
  if (e.latency.cold_start_min_s < 0 ||
      e.latency.cold_start_max_s < e.latency.cold_start_min_s)
    bad("latency cold-start window is invalid");
  if (e.latency.oom_fraction <= 0 || e.latency.oom_fraction > 1)
    bad("latency.oom_fraction must lie in (0, 1]");
  if (e.concurrency_limit < 1) bad("engine.concurrency_limit must be >= 1");
  if (e.keep_alive_s < 0) bad("engine.keep_alive_s must be >= 0");
  if (e.max_instances_per_version < 1)
    bad("engine.max_instances_per_version must be >= 1");
  if (e.baseline_mem_mib < 1) bad("engine.baseline_mem_mib must be >= 1");
  if (e.function_timeout_s <= 0) bad("engine.function_timeout_s must be > 0");

  bool has_trace = !cfg.workload.trace_path.empty();
  bool has_synth = !cfg.workload.synthetic.empty();
  if (has_trace && has_synth)
    bad("workload: choose either a trace or synthetic streams, not both");
  if (!has_trace && !has_synth) bad("workload: no source configured");
  if (cfg.workload.clock_scale <= 0) bad("workload.clock_scale must be > 0");

  std::set<std::string> names;
  for (const auto& p : profiles) {
    p.validate();
    if (!names.insert(p.name).second)
      bad("duplicate profile '" + p.name + "'");
  }
  for (const auto& s : cfg.workload.synthetic) {
    if (!names.count(s.function))
      bad("synthetic workload references unknown function '" + s.function +
          "'");
    if (s.spec.rate_lambda <= 0) bad("synthetic rate_lambda must be > 0");
    if (s.spec.duration_s <= 0) bad("synthetic duration_s must be > 0");
    if (s.spec.payload_sigma < 0) bad("synthetic payload_sigma must be >= 0");
  }
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["out_dir"] = cfg.out_dir;
  auto vs = nlohmann::ordered_json::array();
  for (auto v : cfg.variants) vs.push_back(to_string(v));
  j["variants"] = std::move(vs);
  j["seeds"] = cfg.seeds;
  j["profiles"] = cfg.profile_paths;
  nlohmann::ordered_json w;
  if (!cfg.workload.trace_path.empty()) {
    w["trace"] = cfg.workload.trace_path;
    w["clock_scale"] = cfg.workload.clock_scale;
  } else {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : cfg.workload.synthetic) {
      nlohmann::ordered_json e;
      e["function"] = s.function;
      e["rate_lambda"] = s.spec.rate_lambda;
      e["payload_mu"] = s.spec.payload_mu;
      e["payload_sigma"] = s.spec.payload_sigma;
      e["duration_s"] = s.spec.duration_s;
      arr.push_back(std::move(e));
    }
    w["synthetic"] = std::move(arr);
  }
  j["workload"] = std::move(w);

  const auto& e = cfg.engine;
  j["cluster"] = {{"total_cpu_mc", e.cluster.total_cpu_mc},
                  {"total_mem_mib", e.cluster.total_mem_mib}};
  j["balancer"] = {
      {"tolerance", e.balancer.tolerance},
      {"explore_mode",
       e.balancer.explore_mode == ExploreMode::Window ? "window" : "bernoulli"},
      {"explore_p", e.balancer.explore_p},
      {"balancer_latency_s", e.balancer.balancer_latency_s},
      {"max_versions", e.balancer.max_versions}};
  j["queue"] = {{"capacity", e.queue.capacity},
                {"retry_interval_s", e.queue.retry_interval_s},
                {"max_retries", e.queue.max_retries},
                {"claim_retries", e.queue.claim_retries}};
  j["optimizer"] = {{"alpha", e.optimizer.alpha},
                    {"beta", e.optimizer.beta},
                    {"gamma", e.optimizer.gamma},
                    {"interval_s", e.optimizer.interval_s},
                    {"solve_latency_s", e.optimizer.solve_latency_s},
                    {"kappa_per_minute", e.optimizer.kappa_per_minute},
                    {"budget_s", e.optimizer.budget_s},
                    {"cold_start_term", e.optimizer.cold_start_term},
                    {"cs_penalty", e.optimizer.cs_penalty}};
  j["redundancy"] = {{"check_interval_s", e.redundancy.check_interval_s},
                     {"cooldown_s", e.redundancy.cooldown_s}};
  j["predictor"] = {
      {"kind", e.predictor.kind == PredictorKind::NoisyOracle ? "noisy_oracle"
                                                              : "table_lookup"},
      {"refresh_interval_s", e.predictor.refresh_interval_s},
      {"unique_latency_s", e.predictor.unique_latency_s},
      {"cached_latency_s", e.predictor.cached_latency_s},
      {"noise_pct", e.predictor.noise_pct},
      {"quantize_step_mib", e.predictor.quantize_step_mib},
      {"cpu_per_mib", e.predictor.cpu_per_mib}};
  j["pricing"] = {{"price_per_gb_s", e.pricing.price_per_gb_s},
                  {"price_per_request", e.pricing.price_per_request}};
  j["latency"] = {{"cold_start_min_s", e.latency.cold_start_min_s},
                  {"cold_start_max_s", e.latency.cold_start_max_s},
                  {"apply_action_s", e.latency.apply_action_s},
                  {"oom_fraction", e.latency.oom_fraction}};
  j["engine"] = {{"concurrency_limit", e.concurrency_limit},
                 {"keep_alive_s", e.keep_alive_s},
                 {"max_instances_per_version", e.max_instances_per_version},
                 {"baseline_mem_mib", e.baseline_mem_mib},
                 {"function_timeout_s", e.function_timeout_s},
                 {"dump_plans", e.dump_plans}};
  return j.dump(2) + "\n";
}

std::string explain_config(const ExperimentConfig& cfg) {
  const auto& e = cfg.engine;
  std::ostringstream os;
  auto line = [&](const std::string& key, const std::string& value,
                  const std::string& why) {
    os << key << " = " << value << "\n    " << why << "\n";
  };
  auto d = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  os << "Resolved configuration and provenance of each default:\n\n";
  line("cluster.total_cpu_mc", std::to_string(e.cluster.total_cpu_mc),
       "evaluation cluster size: 68 vCPUs expressed in millicores");
  line("cluster.total_mem_mib", std::to_string(e.cluster.total_mem_mib),
       "evaluation cluster size: 288 GiB expressed in MiB");
  line("engine.concurrency_limit", std::to_string(e.concurrency_limit),
       "per-instance function concurrency (M_p); platform default of 10");
  line("engine.baseline_mem_mib", std::to_string(e.baseline_mem_mib),
       "static baseline memory; 1769 MiB is the AWS Lambda size that maps "
       "to exactly 1 vCPU");
  line("engine.max_instances_per_version",
       std::to_string(e.max_instances_per_version),
       "scaling cap of 100 instances per deployment");
  line("engine.function_timeout_s", d(e.function_timeout_s),
       "10-minute function execution timeout");
  line("engine.keep_alive_s", d(e.keep_alive_s),
       "idle instance keep-alive; artifact default (platforms use a "
       "dynamic idle timeout, value unspecified)");
  line("predictor.cpu_per_mib", d(e.predictor.cpu_per_mib),
       "CPU follows memory proportionally, AWS-style: 1769 MiB <-> 1 vCPU "
       "gives 0.5625 millicores per MiB");
  line("predictor.unique_latency_s", d(e.predictor.unique_latency_s),
       "measured predictor overhead for a unique (uncached) inference");
  line("predictor.cached_latency_s", d(e.predictor.cached_latency_s),
       "measured predictor overhead for a cached inference");
  line("predictor.refresh_interval_s", d(e.predictor.refresh_interval_s),
       "prediction-model refresh window; artifact default of 2 hours");
  line("predictor.quantize_step_mib",
       std::to_string(e.predictor.quantize_step_mib),
       "memory sizes are offered in 64 MiB steps, mirroring public "
       "FaaS memory tiers");
  line("balancer.explore_p", d(e.balancer.explore_p),
       "cold-start exploration probability of 20%");
  line("balancer.tolerance", d(e.balancer.tolerance),
       "window-mode exploration tolerance around the best score");
  line("balancer.balancer_latency_s", d(e.balancer.balancer_latency_s),
       "measured request-balancer overhead of 40 ms");
  line("balancer.max_versions", std::to_string(e.balancer.max_versions),
       "at most 50 distinct function versions cluster-wide");
  line("queue.capacity", std::to_string(e.queue.capacity),
       "finite request buffer K = 10");
  line("queue.retry_interval_s", d(e.queue.retry_interval_s),
       "queued requests retry every 10 ms");
  line("queue.max_retries", std::to_string(e.queue.max_retries),
       "a queued request is dropped after this many failed retries; "
       "artifact default");
  line("queue.claim_retries", std::to_string(e.queue.claim_retries),
       "optimistic-claim rescan attempts under contention; artifact default");
  line("optimizer.interval_s", d(e.optimizer.interval_s),
       "optimization cycle period; artifact default of one minute");
  line("optimizer.solve_latency_s", d(e.optimizer.solve_latency_s),
       "measured solver latency of 1.45 s, applied off the request path");
  line("optimizer.kappa_per_minute", d(e.optimizer.kappa_per_minute),
       "per-instance serviceable throughput of 10 requests per minute");
  line("optimizer.alpha/beta/gamma",
       d(e.optimizer.alpha) + "/" + d(e.optimizer.beta) + "/" +
           d(e.optimizer.gamma),
       "objective weights for cost, unserved-demand penalty, and served "
       "utility; artifact defaults (no published values)");
  line("optimizer.cold_start_term",
       e.optimizer.cold_start_term ? "true" : "false",
       "optional cold-start-aware objective term, disabled by default");
  line("redundancy.check_interval_s", d(e.redundancy.check_interval_s),
       "failure scan every 15 s");
  line("redundancy.cooldown_s", d(e.redundancy.cooldown_s),
       "30 s cooldown between scaling actions on one version");
  line("pricing.price_per_gb_s", d(e.pricing.price_per_gb_s),
       "AWS Lambda GB-second rate (x86, us-east-1)");
  line("pricing.price_per_request", d(e.pricing.price_per_request),
       "AWS Lambda per-invocation fee");
  line("latency.cold_start", d(e.latency.cold_start_min_s) + ".." +
                                 d(e.latency.cold_start_max_s) + " s",
       "cold-start cost modeled as uniform over 2-6 s");
  line("latency.apply_action_s", d(e.latency.apply_action_s),
       "time for a scaling decision to be applied; artifact default");
  line("latency.oom_fraction", d(e.latency.oom_fraction),
       "fraction of nominal runtime an under-provisioned execution "
       "survives before the OOM kill; artifact default");
  return os.str();
}

std::vector<FunctionProfile> load_profiles(const ExperimentConfig& cfg) {
  std::vector<FunctionProfile> out;
  for (const auto& p : cfg.profile_paths) out.push_back(load_profile(p));
  return out;
}

std::vector<Request> build_workload(
    const ExperimentConfig& cfg, const std::vector<FunctionProfile>& profiles,
    std::uint64_t seed) {
  if (!cfg.workload.trace_path.empty())
    return load_trace(cfg.workload.trace_path, cfg.workload.clock_scale,
                      profiles);
  std::vector<Request> all;
  std::uint64_t stream = 0;
  for (const auto& entry : cfg.workload.synthetic) {
    const FunctionProfile* profile = nullptr;
    for (const auto& p : profiles)
      if (p.name == entry.function) profile = &p;
    if (!profile)
      throw std::runtime_error("no profile for synthetic function '" +
                               entry.function + "'");
    SyntheticSpec spec = entry.spec;
    spec.seed = seed ^ (0x9e3779b97f4a7c15ULL * (++stream));
    auto reqs = generate(spec, *profile);
    all.insert(all.end(), reqs.begin(), reqs.end());
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Request& a, const Request& b) {
                     return a.arrival < b.arrival;
                   });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].id = i + 1;
  return all;
}

}  // namespace saarthi

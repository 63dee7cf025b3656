#include "saarthi/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace saarthi {

MetricsReport replay_metrics(const std::vector<LogRecord>& log,
                             const PricingConfig* pricing_override) {
  MetricsReport report;
  if (log.empty() || log.front().kind != "run_header")
    throw std::runtime_error("log integrity error: missing run_header");

  const auto& header = log.front().detail;
  report.variant = header.at("variant").get<std::string>();
  report.seed = header.at("seed").get<std::uint64_t>();
  report.pricing.price_per_gb_s =
      header.at("pricing").at("price_per_gb_s").get<double>();
  report.pricing.price_per_request =
      header.at("pricing").at("price_per_request").get<double>();
  if (pricing_override) report.pricing = *pricing_override;

  std::map<std::string, double> slo;
  for (const auto& f : header.at("functions")) {
    slo[f.at("name").get<std::string>()] = f.at("slo_seconds").get<double>();
  }

  const std::int64_t rate_pico =
      Cost::rate_pico(report.pricing.price_per_gb_s);

  struct Pending {
    std::string function;
    SimTime arrival = 0;
    bool open = false;
  };
  std::map<std::int64_t, Pending> pending;
  std::set<std::string> versions_seen;
  std::set<std::string> instances_seen;

  auto fm = [&](const std::string& fn) -> FunctionMetrics& {
    auto& m = report.per_function[fn];
    if (m.function.empty()) {
      m.function = fn;
      m.slo_seconds = slo.count(fn) ? slo[fn] : 0.0;
    }
    return m;
  };

  for (const auto& rec : log) {
    if (rec.kind == "arrival") {
      const auto fn = rec.detail.at("function").get<std::string>();
      pending[rec.request_id] = Pending{fn, rec.at_us, true};
      fm(fn).total_requests++;
    } else if (rec.kind == "exec_done") {
      auto it = pending.find(rec.request_id);
      if (it == pending.end() || !it->second.open)
        throw std::runtime_error(
            "log integrity error: exec_done without open request " +
            std::to_string(rec.request_id));
      auto& m = fm(it->second.function);
      const auto outcome = rec.detail.at("outcome").get<std::string>();
      if (!rec.detail.contains("billed_ms"))
        throw std::runtime_error(
            "log integrity error: executed request without billed_ms");
      std::int64_t billed_ms = rec.detail.at("billed_ms").get<std::int64_t>();
      std::int64_t mem_mib = rec.detail.at("mem_mib").get<std::int64_t>();
      m.cost.add_execution(mem_mib, billed_ms, rate_pico);
      if (outcome == "succeeded") {
        m.succeeded++;
        SimTime e2e = rec.at_us - it->second.arrival;
        SimTime exec = rec.detail.at("duration_us").get<SimTime>();
        if (us_to_seconds(e2e) <= m.slo_seconds) m.sla_e2e_met++;
        if (us_to_seconds(exec) <= m.slo_seconds) m.sla_exec_met++;
      } else {
        m.failed_oom++;
      }
      it->second.open = false;
    } else if (rec.kind == "dropped") {
      auto it = pending.find(rec.request_id);
      if (it == pending.end() || !it->second.open)
        throw std::runtime_error(
            "log integrity error: drop without open request");
      auto& m = fm(it->second.function);
      const auto reason = rec.detail.at("reason").get<std::string>();
      if (reason == "queue_full")
        m.dropped_queue_full++;
      else
        m.dropped_retries++;
      it->second.open = false;
    } else if (rec.kind == "cold_start_begin" || rec.kind == "instance_ready") {
      if (!rec.version.empty()) versions_seen.insert(rec.version);
      if (rec.detail.contains("instance"))
        instances_seen.insert(rec.detail.at("instance").get<std::string>());
    } else if (rec.kind == "scale_action") {
      report.scale_events++;
    }
  }

  for (const auto& [id, p] : pending) {
    if (p.open)
      throw std::runtime_error("log integrity error: request " +
                               std::to_string(id) +
                               " has no terminal record (truncated log?)");
  }

  report.unique_configurations = static_cast<std::int64_t>(versions_seen.size());
  report.total_unique_instances =
      static_cast<std::int64_t>(instances_seen.size());

  auto& agg = report.aggregate;
  agg.function = "__all__";
  for (const auto& [fn, m] : report.per_function) {
    agg.total_requests += m.total_requests;
    agg.succeeded += m.succeeded;
    agg.failed_oom += m.failed_oom;
    agg.dropped_queue_full += m.dropped_queue_full;
    agg.dropped_retries += m.dropped_retries;
    agg.sla_e2e_met += m.sla_e2e_met;
    agg.sla_exec_met += m.sla_exec_met;
    agg.cost.duration_num += m.cost.duration_num;
    agg.cost.billed_requests += m.cost.billed_requests;
  }
  return report;
}

void score(std::vector<MetricsReport>& reports, double w_sla, double w_cost,
           double w_success) {
  if (reports.size() < 2)
    throw std::invalid_argument(
        "score needs a comparison set of at least 2 reports");
  if (std::abs(w_sla + w_cost + w_success - 1.0) > 1e-9)
    throw std::invalid_argument("score weights must sum to 1");

  auto minmax_norm = [](const std::vector<double>& vals) {
    auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    std::vector<double> out(vals.size(), 1.0);
    if (*mx > *mn) {
      for (size_t i = 0; i < vals.size(); ++i)
        out[i] = (vals[i] - *mn) / (*mx - *mn);
    }
    return out;
  };

  std::vector<double> sla, neg_cost, success;
  for (const auto& r : reports) {
    sla.push_back(r.aggregate.sla_rate_e2e());
    neg_cost.push_back(-r.total_cost_dollars());
    success.push_back(r.aggregate.success_rate());
  }
  auto n_sla = minmax_norm(sla);
  auto n_cost = minmax_norm(neg_cost);
  auto n_success = minmax_norm(success);
  for (size_t i = 0; i < reports.size(); ++i) {
    reports[i].overall_score =
        w_sla * n_sla[i] + w_cost * n_cost[i] + w_success * n_success[i];
  }
}

namespace {

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

void csv_row(std::ostringstream& os, const MetricsReport& r,
             const FunctionMetrics& m) {
  os << r.variant << ',' << r.seed << ',' << m.function << ','
     << m.total_requests << ',' << m.succeeded << ',' << m.failed_oom << ','
     << m.dropped_queue_full << ',' << m.dropped_retries << ','
     << fmt(m.success_rate()) << ',' << fmt(m.sla_rate_e2e()) << ','
     << fmt(m.sla_rate_exec()) << ','
     << fmt(m.cost.dollars(Cost::rate_pico(r.pricing.price_per_request)), 9)
     << '\n';
}

}  // namespace

std::string report_csv_header() {
  return "variant,seed,function,total_requests,succeeded,failed_oom,"
         "dropped_queue_full,dropped_retries,success_rate,sla_rate_e2e,"
         "sla_rate_exec,cost_dollars\n";
}

std::string report_csv_rows(const MetricsReport& report) {
  std::ostringstream os;
  for (const auto& [fn, m] : report.per_function) csv_row(os, report, m);
  csv_row(os, report, report.aggregate);
  return os.str();
}

std::string comparison_table(const std::vector<MetricsReport>& reports) {
  std::ostringstream os;
  os << "variant,seed,total_requests,success_rate,sla_rate_e2e,sla_rate_exec,"
        "cost_dollars,unique_configurations,total_unique_instances,"
        "scale_events,overall_score\n";
  for (const auto& r : reports) {
    os << r.variant << ',' << r.seed << ',' << r.aggregate.total_requests
       << ',' << fmt(r.aggregate.success_rate()) << ','
       << fmt(r.aggregate.sla_rate_e2e()) << ','
       << fmt(r.aggregate.sla_rate_exec()) << ','
       << fmt(r.total_cost_dollars(), 9) << ',' << r.unique_configurations
       << ',' << r.total_unique_instances << ',' << r.scale_events << ','
       << fmt(r.overall_score) << '\n';
  }
  return os.str();
}

}  // namespace saarthi

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saarthi/config.hpp"
#include "saarthi/simengine.hpp"

namespace fs = std::filesystem;
using namespace saarthi;

namespace {

std::string cell_name(Variant v, std::uint64_t seed) {
  return std::string(to_string(v)) + "-seed" + std::to_string(seed);
}

int cmd_run(const std::string& config_path, const std::string& variant_flag,
            const std::string& seed_flag, const std::string& out_flag,
            bool dump_plans, bool dry_run, bool explain) {
  ExperimentConfig cfg = load_config(config_path);
  apply_env_overrides(cfg);
  if (!variant_flag.empty()) cfg.variants = parse_variant_list(variant_flag);
  if (!seed_flag.empty()) cfg.seeds = parse_seed_spec(seed_flag);
  if (!out_flag.empty()) cfg.out_dir = out_flag;
  if (dump_plans) cfg.engine.dump_plans = true;

  auto profiles = load_profiles(cfg);
  validate_config(cfg, profiles);

  if (explain) {
    std::cout << explain_config(cfg);
    return 0;
  }
  if (dry_run) {
    std::cout << resolved_config_json(cfg);
    return 0;
  }

  fs::create_directories(cfg.out_dir);
  std::vector<MetricsReport> reports;
  std::ofstream csv(fs::path(cfg.out_dir) / "report.csv");
  csv << report_csv_header();

  for (Variant variant : cfg.variants) {
    for (std::uint64_t seed : cfg.seeds) {
      auto workload = build_workload(cfg, profiles, seed);
      RunResult result = run(cfg.engine, profiles, workload, variant, seed);

      std::string name = cell_name(variant, seed);
      result.log.write_file((fs::path(cfg.out_dir) / (name + ".log")).string());
      csv << report_csv_rows(result.report);
      if (cfg.engine.dump_plans && !result.plan_dumps.empty()) {
        std::ofstream plans(fs::path(cfg.out_dir) / (name + ".plans.ndjson"));
        for (const auto& p : result.plan_dumps) plans << p << "\n";
      }
      reports.push_back(std::move(result.report));
      std::cerr << name << ": " << reports.back().aggregate.total_requests
                << " requests, success_rate="
                << reports.back().aggregate.success_rate() << ", cost=$"
                << reports.back().total_cost_dollars() << "\n";
    }
  }

  if (reports.size() >= 2) score(reports, 1.0 / 3, 1.0 / 3, 1.0 / 3);
  std::string table = comparison_table(reports);
  std::ofstream cmp(fs::path(cfg.out_dir) / "comparison.csv");
  cmp << table;
  std::cout << table;
  return 0;
}

int cmd_replay(const std::string& log_path, double price_per_gb_s,
               double price_per_request, const std::string& out_flag) {
  auto records = EventLog::read_file(log_path);
  PricingConfig pricing;
  const PricingConfig* override_ptr = nullptr;
  if (price_per_gb_s >= 0 || price_per_request >= 0) {
    MetricsReport base = replay_metrics(records);
    pricing = base.pricing;
    if (price_per_gb_s >= 0) pricing.price_per_gb_s = price_per_gb_s;
    if (price_per_request >= 0) pricing.price_per_request = price_per_request;
    override_ptr = &pricing;
  }
  MetricsReport report = replay_metrics(records, override_ptr);
  std::string csv = report_csv_header() + report_csv_rows(report);
  if (!out_flag.empty()) {
    std::ofstream out(out_flag);
    out << csv;
  }
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saarthi: input-aware serverless orchestration simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string variant_flag, seed_flag, out_flag;
  bool dump_plans = false, dry_run = false, explain = false;

  auto* run_cmd = app.add_subcommand("run", "run experiment cells");
  run_cmd->add_option("-c,--config", config_path, "experiment config (JSON)")
      ->required();
  run_cmd->add_option("--variant", variant_flag,
                      "comma-separated variants "
                      "(baseline,mvq,mevq,moevq); overrides config");
  run_cmd->add_option("--seed", seed_flag,
                      "seed list/range, e.g. 3 or 1..5; overrides config");
  run_cmd->add_option("--out", out_flag, "output directory; overrides config");
  run_cmd->add_flag("--dump-plans", dump_plans,
                    "write one optimizer-plan document per cycle");
  run_cmd->add_flag("--dry-run", dry_run,
                    "validate and print the resolved config, run nothing");
  run_cmd->add_flag("--explain-config", explain,
                    "print every default, its value, and its provenance");

  std::string log_path, replay_out;
  double price_gb_s = -1.0, price_req = -1.0;
  auto* replay_cmd =
      app.add_subcommand("replay", "recompute metrics from an event log");
  replay_cmd->add_option("log", log_path, "event log path")->required();
  replay_cmd->add_option("--price-per-gb-s", price_gb_s,
                         "override the GB-second rate");
  replay_cmd->add_option("--price-per-request", price_req,
                         "override the per-invocation fee");
  replay_cmd->add_option("--out", replay_out, "also write the CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(config_path, variant_flag, seed_flag, out_flag,
                     dump_plans, dry_run, explain);
    return cmd_replay(log_path, price_gb_s, price_req, replay_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

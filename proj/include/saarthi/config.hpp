#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "saarthi/simengine.hpp"
#include "saarthi/workload.hpp"

namespace saarthi {

// Workload source: either a CSV trace or per-function synthetic streams.
struct WorkloadSpec {
  std::string trace_path;  // non-empty selects trace mode
  double clock_scale = 1.0;
  struct SyntheticEntry {
    std::string function;
    SyntheticSpec spec;  // spec.seed is derived from the cell seed
  };
  std::vector<SyntheticEntry> synthetic;
};

struct ExperimentConfig {
  EngineConfig engine;
  std::vector<std::string> profile_paths;
  WorkloadSpec workload;
  std::vector<Variant> variants{Variant::Moevq};
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
};

// "3" -> {3}; "1..5" -> {1,2,3,4,5}; "1,4,9" -> {1,4,9}.
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);
// Comma-separated variant names.
std::vector<Variant> parse_variant_list(const std::string& spec);

FunctionProfile parse_profile(const std::string& text,
                              const std::string& origin);
FunctionProfile load_profile(const std::string& path);

// Parses the JSON config document; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin);
ExperimentConfig load_config(const std::string& path);

// Applies SAARTHI_* environment overrides (see README for the list).
// `getenv` is injectable for tests; defaults to std::getenv.
void apply_env_overrides(
    ExperimentConfig& cfg,
    const std::function<const char*(const char*)>& getenv_fn = nullptr);

// Cross-field validation: named errors, nothing partial.
void validate_config(const ExperimentConfig& cfg,
                     const std::vector<FunctionProfile>& profiles);

// The fully resolved config as a JSON document (the --dry-run output).
std::string resolved_config_json(const ExperimentConfig& cfg);

// Every default, its resolved value, and where the number comes from
// (the --explain-config output).
std::string explain_config(const ExperimentConfig& cfg);

std::vector<FunctionProfile> load_profiles(const ExperimentConfig& cfg);
std::vector<Request> build_workload(const ExperimentConfig& cfg,
                                    const std::vector<FunctionProfile>& profiles,
                                    std::uint64_t seed);

}  // namespace saarthi

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "saarthi/domain.hpp"

namespace saarthi {

enum class PredictorKind { TableLookup, NoisyOracle };

struct PredictorConfig {
  PredictorKind kind = PredictorKind::TableLookup;
  double refresh_interval_s = 7200.0;  // model refresh window
  double unique_latency_s = 0.1;       // cache miss
  double cached_latency_s = 0.0001;    // cache hit
  double noise_pct = 0.0;              // NoisyOracle: eps ~ U(-noise, +noise)
  std::int64_t quantize_step_mib = 64;
  double cpu_per_mib = kDefaultCpuPerMib;
  std::uint64_t seed = 1;
};

struct PredictOutcome {
  ResourcePrediction pred;
  double latency_s = 0.0;
};

// Input-aware resource prediction with an inference cache keyed on
// (function, payload) and a periodic refresh that drops the cache.
class Predictor {
 public:
  explicit Predictor(PredictorConfig cfg)
      : cfg_(cfg), rng_(cfg.seed) {}

  PredictOutcome predict(const Request& request,
                         const FunctionProfile& profile);

  // Clears the cache when now - last_refresh >= refresh_interval.
  bool refresh(SimTime now);

  const PredictorConfig& config() const { return cfg_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  PredictorConfig cfg_;
  std::mt19937_64 rng_;
  SimTime last_refresh_ = 0;
  std::map<std::pair<std::string, std::int64_t>, ResourcePrediction> cache_;
};

}  // namespace saarthi

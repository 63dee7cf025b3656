#include "saarthi/predictor.hpp"

namespace saarthi {

PredictOutcome Predictor::predict(const Request& request,
                                  const FunctionProfile& profile) {
  std::int64_t payload = profile.clamp_payload(request.payload);
  auto key = std::make_pair(request.function, payload);

  if (auto it = cache_.find(key); it != cache_.end()) {
    PredictOutcome out;
    out.pred = it->second;
    out.pred.cached = true;
    out.latency_s = cfg_.cached_latency_s;
    return out;
  }

  double mem = static_cast<double>(profile.mem_required(payload));
  if (cfg_.kind == PredictorKind::NoisyOracle && cfg_.noise_pct > 0.0) {
    std::uniform_real_distribution<double> eps(-cfg_.noise_pct,
                                               cfg_.noise_pct);
    mem *= (1.0 + eps(rng_));
  }
  ResourcePrediction pred;
  pred.mem_mib = quantize_up(static_cast<std::int64_t>(std::ceil(mem)),
                             cfg_.quantize_step_mib);
  pred.cpu_mc = cpu_from_mem(pred.mem_mib, cfg_.cpu_per_mib);
  pred.cached = false;
  cache_.emplace(std::move(key), pred);

  return PredictOutcome{pred, cfg_.unique_latency_s};
}

bool Predictor::refresh(SimTime now) {
  if (now - last_refresh_ < seconds_to_us(cfg_.refresh_interval_s))
    return false;
  cache_.clear();
  last_refresh_ = now;
  return true;
}

}  // namespace saarthi

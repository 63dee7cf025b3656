#include "saarthi/redundancy.hpp"

namespace saarthi {

std::vector<ScaleAction> scan_and_scale(
    const std::vector<VersionHealth>& versions, SimTime now,
    std::map<std::string, SimTime>& last_action, const RedundancyConfig& cfg) {
  std::vector<ScaleAction> actions;
  const SimTime cooldown = seconds_to_us(cfg.cooldown_s);
  for (const auto& vh : versions) {
    const std::string key = vh.version.id();
    if (auto it = last_action.find(key);
        it != last_action.end() && now - it->second < cooldown) {
      continue;
    }
    if (vh.failing <= 0) continue;
    actions.push_back(
        ScaleAction{vh.version, vh.current, vh.current + vh.failing});
    last_action[key] = now;
  }
  return actions;
}

}  // namespace saarthi

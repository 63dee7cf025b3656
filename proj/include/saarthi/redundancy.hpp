#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "saarthi/domain.hpp"
#include "saarthi/optimizer.hpp"

namespace saarthi {

struct RedundancyConfig {
  double check_interval_s = 15.0;
  double cooldown_s = 30.0;  // T_cooldown
  std::set<FailureReason> failure_states{FailureReason::OomKilled,
                                         FailureReason::CrashLoopBackOff};
};

struct VersionHealth {
  FunctionVersion version;
  std::int64_t current = 0;  // total replicas, failing included
  std::int64_t failing = 0;  // replicas in a failure state
};

// Additive compensation scaling: per version, outside its cooldown window,
// scale current -> current + failing when failing > 0. Records the action
// time in last_action; failed instances are expected to be replaced once
// counted so the scan stays idempotent per failure.
std::vector<ScaleAction> scan_and_scale(
    const std::vector<VersionHealth>& versions, SimTime now,
    std::map<std::string, SimTime>& last_action, const RedundancyConfig& cfg);

}  // namespace saarthi

#pragma once

// Named, deterministic verification scenarios. Each one computes a set of
// quantities with fixed default seeds and checks them against closed forms,
// exact counterexample values or independent oracles.

#include <map>
#include <string>
#include <vector>

#include "ninput/report.hpp"

namespace ninput {

using Overrides = std::map<std::string, std::string>;

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::map<std::string, std::string> defaults;   // every accepted parameter
};

/// Registry entries sorted by name.
std::vector<ScenarioInfo> scenario_catalog();
std::vector<std::string> list_scenarios();

/// Runs one scenario. Unknown names throw UnknownScenario; unknown or
/// malformed parameters throw InvalidArgument. Besides the scenario's own
/// parameters every scenario accepts `seed`, `tuples` and `tol_scale`
/// (multiplies every tolerance).
Report run_scenario(const std::string& name, const Overrides& overrides = {});

}  // namespace ninput

#pragma once

#include <iosfwd>
#include <string>

#include <yaml-cpp/yaml.h>

#include "cslammot/sim/scenario.hpp"

namespace cslammot::sim {

/// Builds a scenario from a `scenario:` section. `builtin: <name>` starts from a builtin
/// scenario; any other keys override or define fields. Throws std::invalid_argument on
/// malformed input.
Scenario scenarioFromYaml(const YAML::Node& node);
Scenario loadScenarioFile(const std::string& path);

/// Full explicit form (no builtin reference), readable by scenarioFromYaml.
YAML::Node scenarioToYaml(const Scenario& scenario);
void saveScenario(std::ostream& out, const Scenario& scenario);

}  // namespace cslammot::sim

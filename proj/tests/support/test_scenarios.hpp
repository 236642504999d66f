#pragma once

#include <fstream>
#include <string>

#include "json.hpp"
#include "leolora/scenario.hpp"

namespace testing_support {

inline std::string default_scenario_path() { return std::string(LEOLORA_SCENARIO_DIR) + "/paper-default.json"; }

inline nlohmann::json default_scenario_json() {
  std::ifstream in(default_scenario_path());
  return nlohmann::json::parse(in);
}

inline leolora::ScenarioConfig default_scenario() { return leolora::load_scenario_file(default_scenario_path()); }

}  // namespace testing_support

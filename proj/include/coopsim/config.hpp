#pragma once

#include <stdexcept>
#include <string>

#include "coopsim/simulator.hpp"

namespace coopsim {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioFile {
  ScenarioSpec spec;
  std::string output_dir = "out";
};

// Parses and validates a scenario config document. Unknown keys and missing
// required fields raise SchemaError naming the offending key.
ScenarioFile parse_scenario(const std::string& json_text);
ScenarioFile load_scenario(const std::string& path);

inline constexpr int kScenarioSchemaVersion = 1;

}  // namespace coopsim

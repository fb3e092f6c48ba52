#pragma once

#include <stdexcept>
#include <string>

namespace hysterix {

// Malformed scenario input: JSON syntax errors (message carries line and
// column), schema violations (message carries the JSON path), or IO
// problems. Callers map this to the usage exit code.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Executes one scenario and, when out_dir is nonempty, writes result.json
// and series.csv into it (creating the directory if needed). Returns 0 when
// every embedded check passed and 2 otherwise.
int run_scenario_text(const std::string& text, const std::string& out_dir);
int run_scenario_file(const std::string& path, const std::string& out_dir);

// Scenario seed after the HYSTERIX_SEED environment override.
unsigned long long effective_seed(unsigned long long scenario_seed);

}  // namespace hysterix

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "curio/world.hpp"

namespace curio {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The document is not well-formed JSON or has the wrong shape.
class ParseError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// The document parsed but violates a scenario invariant.
class ValidationError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// Parses and validates a scenario JSON document. Absent params take their defaults.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Emits a document that load_scenario maps back to an equal Scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Checks every scenario invariant; throws ValidationError on the first violation.
void validate_scenario(const Scenario& scenario);
void validate_params(const Params& params);

}  // namespace curio

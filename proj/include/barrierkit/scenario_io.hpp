#pragma once

// Scenario files (JSON) and input schedule files (CSV).

#include <string>
#include <vector>

#include "barrierkit/model.hpp"

namespace barrierkit {

struct LoadedScenario {
  Scenario scenario;
  std::vector<std::string> notices;  // e.g. reordered input bounds
};

/// Parses and validates a scenario. Errors are ValidationError with the
/// offending field path in the message.
LoadedScenario parse_scenario(const std::string& json_text);
LoadedScenario load_scenario(const std::string& path);

/// CSV with header t,u1,u2; one row per segment start.
InputSchedule parse_schedule(const std::string& csv_text);
InputSchedule load_schedule(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace barrierkit

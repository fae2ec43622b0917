#pragma once

#include <string>

#include "barrierkit/scenario_io.hpp"

namespace test_support {

inline std::string source_path(const std::string& rel) { return std::string(BARRIERKIT_SOURCE_DIR) + "/" + rel; }

inline barrierkit::Scenario bundled(const std::string& name) {
  return barrierkit::load_scenario(source_path("scenarios/" + name + ".json")).scenario;
}

}  // namespace test_support

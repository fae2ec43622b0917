#pragma once

// Tangency points -> existence -> backward curves -> filter -> assembly.

#include <optional>
#include <string>
#include <vector>

#include "barrierkit/region.hpp"

namespace barrierkit {

struct PipelineResult {
  std::vector<TangencyPoint> tangency;
  std::vector<BarrierCurve> curves;  // one per integrated tangency point
  std::optional<AdmissibleRegion> region;
  std::string assembly_error;        // empty on success
  std::vector<std::string> diagnostics;

  bool complete() const { return region.has_value(); }
};

PipelineResult run_pipeline(const Scenario& scenario);

}  // namespace barrierkit

#include "barrierkit/pipeline.hpp"

#include <algorithm>

namespace barrierkit {

PipelineResult run_pipeline(const Scenario& sc) {
  PipelineResult out;
  out.tangency = ultimate_tangency_points(sc);
  for (const TangencyPoint& tp : out.tangency) {
    const std::string name = "z" + std::to_string(tp.constraint_id);
    if (!tp.in_g) {
      out.diagnostics.push_back(name + " lies outside G; excluded");
      continue;
    }
    if (!tp.existence.exists) {
      out.diagnostics.push_back(name + " has no candidate barrier curve");
      continue;
    }
    try {
      out.curves.push_back(integrate_barrier_backward(tp, sc));
    } catch (const DriftAbort& e) {
      out.diagnostics.push_back(e.what());
    }
  }

  if (out.curves.empty()) {
    out.assembly_error = "no candidate curves";
    return out;
  }
  filter_candidates(out.curves, sc);
  for (const BarrierCurve& c : out.curves) {
    if (c.verdict.kept) continue;
    const std::string name = "z" + std::to_string(c.origin.constraint_id);
    out.diagnostics.push_back(name + " curve discarded" + (c.verdict.unusual ? " (unusual)" : "") + ": " +
                              c.verdict.reason);
  }
  const bool any_kept = std::any_of(out.curves.begin(), out.curves.end(),
                                    [](const BarrierCurve& c) { return c.verdict.kept; });
  if (!any_kept) {
    out.assembly_error = "no candidate curves survive filtering";
    return out;
  }
  try {
    out.region = assemble_boundary(out.curves, sc);
  } catch (const AssemblyError& e) {
    out.assembly_error = std::string(e.what()) + (e.diagnostics().empty() ? "" : ": " + e.diagnostics());
  }
  return out;
}

}  // namespace barrierkit

#pragma once

// CSV, SVG and JSON emitters for pipeline results.

#include <string>
#include <vector>

#include "barrierkit/mrpi.hpp"
#include "barrierkit/pipeline.hpp"

namespace barrierkit {

struct TangencySummary {
  int id = 0;
  double z1 = 0.0;
  double z2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool exists = false;
  double expression = 0.0;
  bool in_g = true;
  bool operator==(const TangencySummary&) const = default;
};

struct LineSummary {
  int id = 0;
  int axis = 1;
  double value = 0.0;
  int input = 1;
  double from_level = 0.0;
  double to_level = 0.0;
  bool operator==(const LineSummary&) const = default;
};

struct CurveSummary {
  int origin = 0;
  int switch_count = 0;
  std::string termination;
  int termination_constraint = 0;
  bool kept = false;
  std::string reason;
  bool unusual = false;
  int samples = 0;
  double max_hamiltonian = 0.0;
  std::string csv;
  bool operator==(const CurveSummary&) const = default;
};

struct AssemblySummary {
  std::string status = "skipped";  // ok | failed | skipped
  std::string message;
  bool open = false;
  std::vector<std::string> arcs;   // "barrier_curve:z2", "constraint_segment:g1", ...
  bool operator==(const AssemblySummary&) const = default;
};

struct MrpiSummary {
  bool nontrivial = false;
  std::string reason;
  bool operator==(const MrpiSummary&) const = default;
};

struct RunSummary {
  std::string label;
  std::vector<std::string> notices;
  std::vector<TangencySummary> tangency;
  std::vector<LineSummary> switching_lines;
  std::vector<CurveSummary> curves;
  AssemblySummary assembly;
  MrpiSummary mrpi;
  std::vector<std::string> diagnostics;
  std::vector<std::string> artifacts;  // file names relative to the output directory
  bool operator==(const RunSummary&) const = default;
};

std::string curve_file_name(const BarrierCurve& curve);

RunSummary summarize(const Scenario& scenario, const PipelineResult& result,
                     const std::vector<std::string>& notices);

std::string to_json(const RunSummary& summary);
RunSummary run_summary_from_json(const std::string& text);

// %.12g
std::string format_number(double v);

/// t,x1,x2,lambda1,lambda2,u1,u2,event in forward-time order.
std::string curve_csv(const BarrierCurve& curve);
/// arc_index,arc_kind,origin,x1,x2 along the loop.
std::string boundary_csv(const AdmissibleRegion& region);
/// t,x1,x2,u1,u2
std::string trajectory_csv(const SimulationResult& result);
/// x1,x2 of the level-set polyline.
std::string mrpi_csv(const MrpiRegion& region);

std::string svg_figure(const Scenario& scenario, const PipelineResult& result);
std::string svg_mrpi(const Scenario& scenario, const MrpiResult& result);

/// Writes through a temporary file in the same directory and renames it.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace barrierkit

#include "barrierkit/viability.hpp"

#include <cmath>
#include <numbers>

namespace barrierkit {

std::string to_string(ViabilityVerdict v) {
  switch (v) {
    case ViabilityVerdict::kSomeViable: return "some_viable";
    case ViabilityVerdict::kAllViolate: return "all_violate";
    case ViabilityVerdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double mean) { return -mean * std::log1p(-uniform01(rng)); }

double characteristic_period(const Scenario& sc, double horizon) {
  const double u1 = 0.5 * (sc.bounds.u1_min + sc.bounds.u1_max);
  const double u2 = 0.5 * (sc.bounds.u2_min + sc.bounds.u2_max);
  const double prod = (sc.params.alpha + u1) * (sc.params.gamma - u2);
  if (!(prod > 0.0)) return horizon / 20.0;
  return 2.0 * std::numbers::pi / std::sqrt(prod);
}

InputSchedule sample_bang_bang_schedule(std::mt19937_64& rng, const Scenario& sc, double horizon) {
  const auto corners = corner_inputs(sc.bounds);
  const double tc = characteristic_period(sc, horizon);
  const double mean = tc * 0.05 * std::pow(10.0, uniform01(rng));
  const auto switches = static_cast<int>(rng() % 4);

  InputSchedule schedule;
  schedule.segments.push_back({0.0, corners[rng() % 4]});
  double t = 0.0;
  for (int k = 0; k < switches; ++k) {
    t += exponential(rng, mean);
    const Input u = corners[rng() % 4];
    if (t >= horizon) continue;  // keep the draw count independent of the horizon
    if (t > schedule.segments.back().t_start) schedule.segments.push_back({t, u});
  }
  return schedule;
}

ViabilityReport verify_point_viability(const State& x, const Scenario& sc, double horizon, int n_samples,
                                       std::uint64_t seed) {
  if (classify_region(x, sc.box) == RegionClass::kOutsideG) {
    throw PreconditionError("verify_point_viability: point is not in G");
  }
  if (n_samples <= 0) throw ValidationError("verify_point_viability: n_samples must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("verify_point_viability: horizon must be > 0");

  ViabilityReport report;
  report.x = x;
  report.n_samples = n_samples;
  report.horizon = horizon;
  report.seed = seed;

  std::mt19937_64 rng(seed);
  const SimulateOptions opts{false};
  for (int k = 0; k < n_samples; ++k) {
    const InputSchedule schedule = sample_bang_bang_schedule(rng, sc, horizon);
    const SimulationResult res = forward_simulate(x, schedule, horizon, sc, opts);
    if (!res.violation_time) ++report.n_viable;
  }
  report.verdict = report.n_viable > 0 ? ViabilityVerdict::kSomeViable : ViabilityVerdict::kAllViolate;
  return report;
}

}  // namespace barrierkit

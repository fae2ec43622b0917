#pragma once

// Sampled-control witnesses for membership in the admissible set.
//
// A schedule that keeps the state in G over the horizon proves viability of
// the start point (up to the horizon); all sampled schedules violating is only
// evidence against it.

#include <cstdint>
#include <random>
#include <string>

#include "barrierkit/model.hpp"

namespace barrierkit {

enum class ViabilityVerdict { kSomeViable, kAllViolate, kInconclusive };

std::string to_string(ViabilityVerdict v);

struct ViabilityReport {
  State x;
  int n_samples = 0;
  int n_viable = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  ViabilityVerdict verdict = ViabilityVerdict::kInconclusive;
};

// Small deterministic draws on top of mt19937_64; the standard distributions
// are not specified bit-for-bit across library implementations.
double uniform01(std::mt19937_64& rng);
double exponential(std::mt19937_64& rng, double mean);

// Characteristic orbit period 2 pi / sqrt((alpha + u1) (gamma - u2)) at the
// midpoint input, or horizon / 20 when that product is not positive.
double characteristic_period(const Scenario& scenario, double horizon);

/// Random bang-bang schedule: a Poisson switching process stopped after K
/// switches, K uniform in {0, .., 3}. The dwell mean is log-uniform in
/// [0.05, 0.5] characteristic periods; each level is a uniformly drawn
/// corner of U.
InputSchedule sample_bang_bang_schedule(std::mt19937_64& rng, const Scenario& scenario, double horizon);

/// Simulates n_samples schedules from x. The verdict is some_viable as soon
/// as one run stays in G for the whole horizon, all_violate otherwise.
/// Throws PreconditionError when x is not in G.
ViabilityReport verify_point_viability(const State& x, const Scenario& scenario, double horizon,
                                       int n_samples, std::uint64_t seed);

}  // namespace barrierkit

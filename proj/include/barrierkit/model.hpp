#pragma once

// Input- and state-constrained Lotka-Volterra predator-prey model.
//
//   x1' = alpha x1 - beta x1 x2 + u1 x1
//   x2' = delta x1 x2 - gamma x2 + u2 x2
//
// Canonical units are kg (biomass) and hours. State constraints form an
// axis-aligned box with g1 = x1 - x1_hi, g2 = -x1 + x1_lo,
// g3 = x2 - x2_hi, g4 = -x2 + x2_lo; G = {g_i <= 0 for all i}.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/numerics.hpp"

namespace barrierkit {

// Absolute tolerance for deciding that a box constraint is active.
inline constexpr double kTolActive = 1e-9;

struct RawBioParams {
  double k1 = 0.0;    // larval growth time [d]
  double k2 = 0.0;    // fish growth time [d]
  double k3 = 0.0;    // larvae consumption rate of fish [g/d]
  double k4 = 0.0;    // adult larva weight [g]
  double k5 = 0.0;    // adult fish weight [g]
  double eta1 = 0.0;  // larval-food conversion efficiency [-]

  void validate() const;
};

struct LVParams {
  double alpha = 0.0;  // prey intrinsic growth rate [1/h]
  double beta = 0.0;   // extraction rate [1/(kg h)]
  double gamma = 0.0;  // predator decline rate [1/h]
  double delta = 0.0;  // consumer growth coefficient [1/(kg h)]

  void validate() const;
  bool operator==(const LVParams&) const = default;
};

struct InputBounds {
  double u1_min = 0.0;
  double u1_max = 0.0;
  double u2_min = 0.0;
  double u2_max = 0.0;

  void validate() const;
  bool operator==(const InputBounds&) const = default;
};

struct StateBox {
  double x1_lo = 0.0;
  std::optional<double> x1_hi;  // nullopt: unbounded
  double x2_lo = 0.0;
  std::optional<double> x2_hi;

  bool bounded() const { return x1_hi.has_value() && x2_hi.has_value(); }
  void validate() const;
};

struct State {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;
};

struct Adjoint {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// A raw input pair; BangBangInput converts to it.
struct Input {
  double u1 = 0.0;
  double u2 = 0.0;
};

struct BangBangInput {
  double u1 = 0.0;
  double u2 = 0.0;

  operator Input() const { return {u1, u2}; }
  bool operator==(const BangBangInput&) const = default;
};

struct Velocity {
  double dx1 = 0.0;
  double dx2 = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

struct Scenario {
  LVParams params;
  InputBounds bounds;
  StateBox box;
  IntegratorConfig numerics;
  std::string label;

  void validate() const;
};

enum class RegionClass { kGMinus, kGZero, kOutsideG };

std::string to_string(RegionClass c);

LVParams derive_params(const RawBioParams& raw);

Velocity vector_field(const State& x, const Input& u, const LVParams& p);

// [[alpha - beta x2 + u1, -beta x1], [delta x2, delta x1 - gamma + u2]]
Mat2 jacobian_x(const State& x, const Input& u, const LVParams& p);

// -jacobian_x^T lambda.
Adjoint adjoint_rhs(const State& x, const Adjoint& lam, const Input& u, const LVParams& p);

// g_i(x); throws ValidationError on ids outside 1..4 and on open bounds.
double constraint_value(int constraint_id, const State& x, const StateBox& box);
bool constraint_bounded(int constraint_id, const StateBox& box);

// Dg_i(x) f(x, u).
double lie_derivative(int constraint_id, const State& x, const Input& u, const LVParams& p,
                      const StateBox& box);

// Indices {i : |g_i(x)| <= kTolActive}; throws RegionError when x is not in G.
std::vector<int> active_set(const State& x, const StateBox& box);

RegionClass classify_region(const State& x, const StateBox& box);

// The four corners of U. The Lie derivatives are affine in u and the LV box
// constraints split into u1-only (g1, g2) and u2-only (g3, g4) families, so
// min over U of max over active constraints is attained at a corner.
std::array<Input, 4> corner_inputs(const InputBounds& bounds);

// min over u in U of max over i in active(x) of L_f g_i(x, u).
// Returns -infinity for points with no active constraint.
double min_max_lie_derivative(const State& x, const LVParams& p, const InputBounds& bounds,
                              const StateBox& box);

// Constant-input equilibrium ((gamma - u2)/delta, (alpha + u1)/beta).
State equilibrium(const Input& u, const LVParams& p);

// V(x) = delta x1 - (gamma - u2) ln x1 + beta x2 - (alpha + u1) ln x2.
// Conserved along constant-input orbits. Not a formula from the barrier
// construction; used as an independent oracle and for the singleton MRPI.
double first_integral(const State& x, const LVParams& p, const Input& u);

struct ScheduleSegment {
  double t_start = 0.0;
  Input u;
};

// Piecewise-constant input; segment i holds on [t_start_i, t_start_{i+1}).
struct InputSchedule {
  std::vector<ScheduleSegment> segments;

  Input at(double t) const;
  void validate(const InputBounds& bounds) const;
};

struct TrajectorySample {
  double t = 0.0;
  State x;
  Input u;
};

struct SimulationResult {
  std::vector<TrajectorySample> path;
  std::optional<double> violation_time;
  int violated_constraint = 0;  // 1..4 when violation_time is set
};

struct SimulateOptions {
  bool record_path = true;
};

// Integrates the model forward under a piecewise-constant schedule until the
// horizon or the first exit from G, localized by bisection.
SimulationResult forward_simulate(const State& x0, const InputSchedule& schedule, double horizon,
                                  const Scenario& scenario, const SimulateOptions& options = {});

}  // namespace barrierkit

#pragma once

// Barrier construction for the box-constrained Lotka-Volterra model:
// points of ultimate tangentiality, their existence conditions, the
// bang-bang input realization, switching lines and backward integration of
// the state-adjoint system from each tangency point.

#include <array>
#include <string>
#include <vector>

#include "barrierkit/model.hpp"

namespace barrierkit {

struct ExistenceVerdict {
  bool exists = false;
  // Left-hand side of the strict inequality that decides existence.
  double expression = 0.0;
};

struct TangencyPoint {
  int constraint_id = 0;  // i* in 1..4
  State z;
  Adjoint lambda_final;   // Dg_{i*}(z)^T
  ExistenceVerdict existence;
  bool in_g = true;       // false when the closed form lands off its face
  double t_bar = 0.0;
};

/// Closed-form tangency points z1..z4 in constraint order; a point is
/// omitted when its constraint is unbounded. Existence verdicts are filled.
std::vector<TangencyPoint> ultimate_tangency_points(const Scenario& scenario);

ExistenceVerdict existence_check(const TangencyPoint& tp, const Scenario& scenario);

/// u_i = u_i^min when lambda_i >= 0, u_i^max otherwise.
BangBangInput input_realization(const Adjoint& lam, const InputBounds& bounds);

struct SwitchingLine {
  int id = 0;          // 1..4
  int axis = 1;        // 1: x1 = value, 2: x2 = value
  double value = 0.0;
  int input = 1;       // which input switches on this line
  double from_level = 0.0;
  double to_level = 0.0;
  int sign_component = 2;  // adjoint component whose sign gates the switch
  int required_sign = -1;
};

/// L1: x1 = (gamma - u2max)/delta, u1 max -> min when lambda2 < 0.
/// L2: x1 = (gamma - u2min)/delta, u1 min -> max when lambda2 > 0.
/// L3: x2 = (alpha + u1max)/beta,  u2 min -> max when lambda1 < 0.
/// L4: x2 = (alpha + u1min)/beta,  u2 max -> min when lambda1 > 0.
std::array<SwitchingLine, 4> switching_lines(const Scenario& scenario);

// Levels are given in forward time.
struct SwitchEvent {
  int input = 1;
  double from_level = 0.0;
  double to_level = 0.0;
  State x;
  Adjoint lambda;
};

struct CurveSample {
  double t = 0.0;
  State x;
  Adjoint lambda;
  BangBangInput u;
  std::string event;  // empty or a CSV event tag
};

struct CurveVerdict {
  bool kept = true;
  std::string reason;
  // Set for discards not caused by the G0 min-max test (no chainable end).
  bool unusual = false;
};

struct BarrierCurve {
  TangencyPoint origin;
  std::vector<CurveSample> path;  // forward-time order, ends at origin.z
  std::vector<SwitchEvent> switches;
  EventKind termination = EventKind::kHorizonCap;
  int termination_constraint = 0;
  CurveVerdict verdict;

  const CurveSample& start() const { return path.front(); }
};

/// Integrates the state and adjoint equations backward from tp with the
/// input chosen by the adjoint signs. The adjoint is renormalized to unit
/// length after every step. Throws PreconditionError when tp does not exist
/// and DriftAbort when |lambda^T f| exceeds the configured threshold.
BarrierCurve integrate_barrier_backward(const TangencyPoint& tp, const Scenario& scenario);

/// |lambda^T f(x, u)| / (|lambda| (1 + |f|)).
double hamiltonian_residual(const State& x, const Adjoint& lam, const Input& u, const LVParams& p);
double max_hamiltonian_residual(const BarrierCurve& curve, const LVParams& p);

/// Distance of a switch state from its line, or a negative value when the
/// switch does not match any line with the required adjoint sign.
double switch_line_residual(const SwitchEvent& sw, const Scenario& scenario);

/// Whether one backward RK4 step of the default size from tp lands strictly
/// inside its constraint (g_{i*} < 0).
bool first_backward_step_enters_interior(const TangencyPoint& tp, const Scenario& scenario);

/// CSV event tag used for an event kind ("switch_u1", "constraint_hit_3", ...).
std::string event_tag(EventKind kind, int index);

}  // namespace barrierkit

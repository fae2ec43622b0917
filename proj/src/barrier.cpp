#include "barrierkit/barrier.hpp"

#include <cmath>
#include <limits>

namespace barrierkit {

std::vector<TangencyPoint> ultimate_tangency_points(const Scenario& scenario) {
  const LVParams& p = scenario.params;
  const InputBounds& b = scenario.bounds;
  const StateBox& box = scenario.box;

  std::vector<TangencyPoint> out;
  auto add = [&](int id, double z1, double z2, Adjoint lam) {
    TangencyPoint tp;
    tp.constraint_id = id;
    tp.z = {z1, z2, 0.0};
    tp.lambda_final = lam;
    tp.in_g = classify_region(tp.z, box) != RegionClass::kOutsideG;
    tp.existence = existence_check(tp, scenario);
    out.push_back(tp);
  };

  if (box.x1_hi) add(1, *box.x1_hi, (p.alpha + b.u1_min) / p.beta, {1.0, 0.0});
  add(2, box.x1_lo, (p.alpha + b.u1_max) / p.beta, {-1.0, 0.0});
  if (box.x2_hi) add(3, (p.gamma - b.u2_min) / p.delta, *box.x2_hi, {0.0, 1.0});
  add(4, (p.gamma - b.u2_max) / p.delta, box.x2_lo, {0.0, -1.0});
  return out;
}

ExistenceVerdict existence_check(const TangencyPoint& tp, const Scenario& scenario) {
  const LVParams& p = scenario.params;
  const InputBounds& b = scenario.bounds;
  const StateBox& box = scenario.box;
  ExistenceVerdict v;
  switch (tp.constraint_id) {
    case 1:
      v.expression = p.delta * *box.x1_hi - p.gamma + b.u2_max;
      v.exists = v.expression > 0.0;
      break;
    case 2:
      v.expression = p.delta * box.x1_lo - p.gamma + b.u2_min;
      v.exists = v.expression < 0.0;
      break;
    case 3:
      v.expression = p.alpha - p.beta * *box.x2_hi + b.u1_min;
      v.exists = v.expression < 0.0;
      break;
    case 4:
      v.expression = p.alpha - p.beta * box.x2_lo + b.u1_max;
      v.exists = v.expression > 0.0;
      break;
    default:
      throw ValidationError("existence_check: constraint id must be in 1..4");
  }
  return v;
}

BangBangInput input_realization(const Adjoint& lam, const InputBounds& bounds) {
  if (lam.lambda1 == 0.0 && lam.lambda2 == 0.0) {
    throw InvariantViolation("input_realization: adjoint is zero");
  }
  return {lam.lambda1 >= 0.0 ? bounds.u1_min : bounds.u1_max,
          lam.lambda2 >= 0.0 ? bounds.u2_min : bounds.u2_max};
}

std::array<SwitchingLine, 4> switching_lines(const Scenario& scenario) {
  const LVParams& p = scenario.params;
  const InputBounds& b = scenario.bounds;
  return {{
      {1, 1, (p.gamma - b.u2_max) / p.delta, 1, b.u1_max, b.u1_min, 2, -1},
      {2, 1, (p.gamma - b.u2_min) / p.delta, 1, b.u1_min, b.u1_max, 2, +1},
      {3, 2, (p.alpha + b.u1_max) / p.beta, 2, b.u2_min, b.u2_max, 1, -1},
      {4, 2, (p.alpha + b.u1_min) / p.beta, 2, b.u2_max, b.u2_min, 1, +1},
  }};
}

double hamiltonian_residual(const State& x, const Adjoint& lam, const Input& u, const LVParams& p) {
  const Velocity f = vector_field(x, u, p);
  const double norm_lam = std::hypot(lam.lambda1, lam.lambda2);
  const double h = lam.lambda1 * f.dx1 + lam.lambda2 * f.dx2;
  return std::abs(h) / (norm_lam * (1.0 + std::hypot(f.dx1, f.dx2)));
}

double max_hamiltonian_residual(const BarrierCurve& curve, const LVParams& p) {
  double worst = 0.0;
  for (const auto& s : curve.path) {
    worst = std::max(worst, hamiltonian_residual(s.x, s.lambda, s.u, p));
  }
  return worst;
}

double switch_line_residual(const SwitchEvent& sw, const Scenario& scenario) {
  double best = -1.0;
  for (const SwitchingLine& line : switching_lines(scenario)) {
    if (line.input != sw.input || line.from_level != sw.from_level || line.to_level != sw.to_level) {
      continue;
    }
    const double other = line.sign_component == 1 ? sw.lambda.lambda1 : sw.lambda.lambda2;
    if ((line.required_sign > 0 && !(other > 0.0)) || (line.required_sign < 0 && !(other < 0.0))) {
      continue;
    }
    const double coord = line.axis == 1 ? sw.x.x1 : sw.x.x2;
    const double d = std::abs(coord - line.value);
    if (best < 0.0 || d < best) best = d;
  }
  return best;
}

std::string event_tag(EventKind kind, int index) {
  switch (kind) {
    case EventKind::kLambda1Zero: return "switch_u1";
    case EventKind::kLambda2Zero: return "switch_u2";
    case EventKind::kConstraintHit: return "constraint_hit_" + std::to_string(index);
    case EventKind::kWindowExit: return "window_exit";
    case EventKind::kHorizonCap: return "horizon_cap";
    case EventKind::kDriftAbort: return "drift_abort";
    case EventKind::kSelfClosure: return "self_closure";
  }
  return "";
}

}  // namespace barrierkit

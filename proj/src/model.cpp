#include "barrierkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace barrierkit {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be finite and > 0 (got " << v << ")";
    throw ValidationError(os.str());
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kLambda1Zero: return "lambda1_zero";
    case EventKind::kLambda2Zero: return "lambda2_zero";
    case EventKind::kConstraintHit: return "constraint_hit";
    case EventKind::kWindowExit: return "window_exit";
    case EventKind::kHorizonCap: return "horizon_cap";
    case EventKind::kDriftAbort: return "drift_abort";
    case EventKind::kSelfClosure: return "self_closure";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  require_positive(step_h, "numerics.step_h");
  require_positive(event_time_tol, "numerics.event_time_tol");
  if (event_time_tol >= step_h) {
    throw ValidationError("numerics.event_time_tol must be smaller than numerics.step_h");
  }
  require_positive(max_arc_time, "numerics.max_arc_time");
  require_positive(hamiltonian_drift_tol, "numerics.hamiltonian_drift_tol");
  require_positive(filter_resolution, "numerics.filter_resolution");
  if (filter_resolution > 0.5) throw ValidationError("numerics.filter_resolution must be <= 0.5");
  require_positive(junction_tol, "numerics.junction_tol");
  require_positive(boundary_tol, "numerics.boundary_tol");
  require_positive(close_tol, "numerics.close_tol");
  if (window) {
    if (!(window->x1_lo < window->x1_hi) || !(window->x2_lo < window->x2_hi)) {
      throw ValidationError("window: each axis needs lo < hi");
    }
  }
}

std::string to_string(RegionClass c) {
  switch (c) {
    case RegionClass::kGMinus: return "G_minus";
    case RegionClass::kGZero: return "G_zero";
    case RegionClass::kOutsideG: return "outside_G";
  }
  return "unknown";
}

void RawBioParams::validate() const {
  require_positive(k1, "raw_bio.k1");
  require_positive(k2, "raw_bio.k2");
  require_positive(k3, "raw_bio.k3");
  require_positive(k4, "raw_bio.k4");
  require_positive(k5, "raw_bio.k5");
  require_positive(eta1, "raw_bio.eta1");
  if (eta1 > 1.0) throw ValidationError("raw_bio.eta1 must lie in (0, 1]");
}

void LVParams::validate() const {
  require_finite(alpha, "params.alpha");
  require_finite(gamma, "params.gamma");
  if (alpha < 0.0) throw ValidationError("params.alpha must be >= 0");
  if (gamma < 0.0) throw ValidationError("params.gamma must be >= 0");
  require_positive(beta, "params.beta");
  require_positive(delta, "params.delta");
}

void InputBounds::validate() const {
  require_finite(u1_min, "input_bounds.u1");
  require_finite(u1_max, "input_bounds.u1");
  require_finite(u2_min, "input_bounds.u2");
  require_finite(u2_max, "input_bounds.u2");
  if (u1_min > u1_max) throw ValidationError("input_bounds.u1: min > max");
  if (u2_min > u2_max) throw ValidationError("input_bounds.u2: min > max");
}

void StateBox::validate() const {
  require_finite(x1_lo, "state_box.x1");
  require_finite(x2_lo, "state_box.x2");
  if (x1_lo < 0.0) throw ValidationError("state_box.x1: lower bound must be >= 0");
  if (x2_lo < 0.0) throw ValidationError("state_box.x2: lower bound must be >= 0");
  if (x1_hi && !(std::isfinite(*x1_hi) && *x1_hi > x1_lo)) {
    throw ValidationError("state_box.x1: need lo < hi");
  }
  if (x2_hi && !(std::isfinite(*x2_hi) && *x2_hi > x2_lo)) {
    throw ValidationError("state_box.x2: need lo < hi");
  }
}

void Scenario::validate() const {
  params.validate();
  bounds.validate();
  box.validate();
  numerics.validate();
  if (!box.bounded()) {
    if (!numerics.window) {
      throw ValidationError("window: required when a state_box upper bound is null");
    }
    if (!box.x1_hi && !(numerics.window->x1_hi > box.x1_lo)) {
      throw ValidationError("window.x1: upper edge must exceed state_box.x1 lower bound");
    }
    if (!box.x2_hi && !(numerics.window->x2_hi > box.x2_lo)) {
      throw ValidationError("window.x2: upper edge must exceed state_box.x2 lower bound");
    }
  }
}

LVParams derive_params(const RawBioParams& raw) {
  raw.validate();
  constexpr double kHoursPerDay = 24.0;
  constexpr double kGramsPerKg = 1000.0;
  LVParams p;
  p.alpha = 1.0 / (kHoursPerDay * raw.k1);
  p.gamma = 1.0 / (kHoursPerDay * raw.k2);
  p.beta = raw.k3 * kGramsPerKg / (kHoursPerDay * raw.k4 * raw.k5);
  p.delta = raw.eta1 * p.beta;
  return p;
}

Velocity vector_field(const State& x, const Input& u, const LVParams& p) {
  return {p.alpha * x.x1 - p.beta * x.x1 * x.x2 + u.u1 * x.x1,
          p.delta * x.x1 * x.x2 - p.gamma * x.x2 + u.u2 * x.x2};
}

Mat2 jacobian_x(const State& x, const Input& u, const LVParams& p) {
  return {{{p.alpha - p.beta * x.x2 + u.u1, -p.beta * x.x1},
           {p.delta * x.x2, p.delta * x.x1 - p.gamma + u.u2}}};
}

Adjoint adjoint_rhs(const State& x, const Adjoint& lam, const Input& u, const LVParams& p) {
  const double a11 = -p.alpha + p.beta * x.x2 - u.u1;
  const double a12 = -p.delta * x.x2;
  const double a21 = p.beta * x.x1;
  const double a22 = -p.delta * x.x1 + p.gamma - u.u2;
  return {a11 * lam.lambda1 + a12 * lam.lambda2, a21 * lam.lambda1 + a22 * lam.lambda2};
}

bool constraint_bounded(int constraint_id, const StateBox& box) {
  switch (constraint_id) {
    case 1: return box.x1_hi.has_value();
    case 3: return box.x2_hi.has_value();
    case 2:
    case 4: return true;
    default: throw ValidationError("constraint id must be in 1..4");
  }
}

double constraint_value(int constraint_id, const State& x, const StateBox& box) {
  if (!constraint_bounded(constraint_id, box)) {
    throw ValidationError("constraint " + std::to_string(constraint_id) + " is unbounded");
  }
  switch (constraint_id) {
    case 1: return x.x1 - *box.x1_hi;
    case 2: return -x.x1 + box.x1_lo;
    case 3: return x.x2 - *box.x2_hi;
    default: return -x.x2 + box.x2_lo;
  }
}

double lie_derivative(int constraint_id, const State& x, const Input& u, const LVParams& p,
                      const StateBox& box) {
  constraint_bounded(constraint_id, box);  // validates the id
  const Velocity f = vector_field(x, u, p);
  switch (constraint_id) {
    case 1: return f.dx1;
    case 2: return -f.dx1;
    case 3: return f.dx2;
    default: return -f.dx2;
  }
}

RegionClass classify_region(const State& x, const StateBox& box) {
  bool on_boundary = false;
  for (int i = 1; i <= 4; ++i) {
    if (!constraint_bounded(i, box)) continue;
    const double g = constraint_value(i, x, box);
    if (g > kTolActive) return RegionClass::kOutsideG;
    if (std::abs(g) <= kTolActive) on_boundary = true;
  }
  return on_boundary ? RegionClass::kGZero : RegionClass::kGMinus;
}

std::vector<int> active_set(const State& x, const StateBox& box) {
  if (classify_region(x, box) == RegionClass::kOutsideG) {
    std::ostringstream os;
    os << "active_set: (" << x.x1 << ", " << x.x2 << ") is not in G";
    throw RegionError(os.str());
  }
  std::vector<int> out;
  for (int i = 1; i <= 4; ++i) {
    if (constraint_bounded(i, box) && std::abs(constraint_value(i, x, box)) <= kTolActive) {
      out.push_back(i);
    }
  }
  return out;
}

std::array<Input, 4> corner_inputs(const InputBounds& b) {
  return {{{b.u1_min, b.u2_min}, {b.u1_min, b.u2_max}, {b.u1_max, b.u2_min}, {b.u1_max, b.u2_max}}};
}

double min_max_lie_derivative(const State& x, const LVParams& p, const InputBounds& bounds,
                              const StateBox& box) {
  std::vector<int> active;
  for (int i = 1; i <= 4; ++i) {
    if (constraint_bounded(i, box) && std::abs(constraint_value(i, x, box)) <= kTolActive) {
      active.push_back(i);
    }
  }
  if (active.empty()) return -std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Input& u : corner_inputs(bounds)) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i : active) worst = std::max(worst, lie_derivative(i, x, u, p, box));
    best = std::min(best, worst);
  }
  return best;
}

State equilibrium(const Input& u, const LVParams& p) {
  return {(p.gamma - u.u2) / p.delta, (p.alpha + u.u1) / p.beta, 0.0};
}

double first_integral(const State& x, const LVParams& p, const Input& u) {
  if (!(x.x1 > 0.0) || !(x.x2 > 0.0)) {
    throw DomainError("first_integral: requires x1 > 0 and x2 > 0");
  }
  return p.delta * x.x1 - (p.gamma - u.u2) * std::log(x.x1) + p.beta * x.x2 -
         (p.alpha + u.u1) * std::log(x.x2);
}

Input InputSchedule::at(double t) const {
  if (segments.empty()) throw ValidationError("schedule: no segments");
  Input u = segments.front().u;
  for (const auto& seg : segments) {
    if (seg.t_start <= t) u = seg.u;
  }
  return u;
}

void InputSchedule::validate(const InputBounds& bounds) const {
  if (segments.empty()) throw ValidationError("schedule: no segments");
  if (segments.front().t_start != 0.0) throw ValidationError("schedule: first segment must start at t = 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!std::isfinite(s.t_start)) throw ValidationError("schedule: non-finite switch time");
    if (i > 0 && !(s.t_start > segments[i - 1].t_start)) {
      throw ValidationError("schedule: switch times must be strictly increasing");
    }
    if (s.u.u1 < bounds.u1_min || s.u.u1 > bounds.u1_max || s.u.u2 < bounds.u2_min ||
        s.u.u2 > bounds.u2_max) {
      std::ostringstream os;
      os << "schedule: segment " << i << " input (" << s.u.u1 << ", " << s.u.u2
         << ") lies outside the input bounds";
      throw ValidationError(os.str());
    }
  }
}

SimulationResult forward_simulate(const State& x0, const InputSchedule& schedule, double horizon,
                                  const Scenario& scenario, const SimulateOptions& options) {
  schedule.validate(scenario.bounds);
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ValidationError("simulate: horizon must be >= 0");
  if (classify_region(x0, scenario.box) == RegionClass::kOutsideG) {
    std::ostringstream os;
    os << "simulate: initial state (" << x0.x1 << ", " << x0.x2 << ") is not in G";
    throw PreconditionError(os.str());
  }

  const LVParams& p = scenario.params;
  Input u = schedule.segments.front().u;
  const Rhs<2> rhs = [&p, &u](const Vec<2>& y) {
    const Velocity f = vector_field({y[0], y[1], 0.0}, u, p);
    return Vec<2>{f.dx1, f.dx2};
  };

  std::vector<Monitor<2>> monitors;
  for (int i = 1; i <= 4; ++i) {
    if (!constraint_bounded(i, scenario.box)) continue;
    monitors.push_back({EventKind::kConstraintHit, i,
                        [i, &scenario](const Vec<2>& y) {
                          return constraint_value(i, {y[0], y[1], 0.0}, scenario.box);
                        },
                        true, +1});
  }

  SimulationResult out;
  Vec<2> y{x0.x1, x0.x2};
  for (std::size_t k = 0; k < schedule.segments.size(); ++k) {
    const double start = schedule.segments[k].t_start;
    if (start >= horizon) break;
    const double end =
        k + 1 < schedule.segments.size() ? std::min(schedule.segments[k + 1].t_start, horizon) : horizon;
    u = schedule.segments[k].u;
    StepSettings settings{scenario.numerics.step_h, scenario.numerics.event_time_tol, end - start};
    const auto res = integrate_with_events<2>(rhs, y, start, Direction::kForward, monitors, settings);
    if (options.record_path) {
      const std::size_t first = out.path.empty() ? 0 : 1;
      for (std::size_t s = first; s < res.samples.size(); ++s) {
        const auto& smp = res.samples[s];
        out.path.push_back({smp.t, {smp.y[0], smp.y[1], smp.t}, u});
      }
    }
    if (res.termination == EventKind::kConstraintHit) {
      out.violation_time = res.events.back().t;
      out.violated_constraint = res.events.back().index;
      return out;
    }
    y = res.samples.back().y;
  }
  return out;
}

}  // namespace barrierkit

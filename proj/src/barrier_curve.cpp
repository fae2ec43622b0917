#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "barrierkit/barrier.hpp"

namespace barrierkit {

namespace {

using Aug = Vec<4>;  // (x1, x2, lambda1, lambda2)

State state_of(const Aug& y) { return {y[0], y[1], 0.0}; }
Adjoint adjoint_of(const Aug& y) { return {y[2], y[3]}; }

// Input in effect just before the current time (backward integration). A zero
// adjoint component takes the sign it has immediately before, -d(lambda_i)/dt;
// for a zero component that rate does not depend on the input.
BangBangInput backward_mode(const Aug& y, const Scenario& sc) {
  const Adjoint lam = adjoint_of(y);
  const Adjoint rate = adjoint_rhs(state_of(y), lam, Input{}, sc.params);
  Adjoint effective = lam;
  if (lam.lambda1 == 0.0) effective.lambda1 = -rate.lambda1;
  if (lam.lambda2 == 0.0) effective.lambda2 = -rate.lambda2;
  if (effective.lambda1 == 0.0 && effective.lambda2 == 0.0) effective = lam;
  const BangBangInput u = input_realization(effective, sc.bounds);
  // A component whose look-ahead sign is still zero falls back to the >= rule.
  return {effective.lambda1 == 0.0 ? input_realization(lam, sc.bounds).u1 : u.u1,
          effective.lambda2 == 0.0 ? input_realization(lam, sc.bounds).u2 : u.u2};
}

void renormalize(Aug& y) {
  const double n = std::hypot(y[2], y[3]);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("barrier integration: adjoint vanished or overflowed");
  }
  y[2] /= n;
  y[3] /= n;
}

double segment_distance(double ax, double ay, double bx, double by, double cx, double cy,
                        double dx, double dy) {
  auto point_seg = [](double px, double py, double sx, double sy, double ex, double ey) {
    const double vx = ex - sx;
    const double vy = ey - sy;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - sx) * vx + (py - sy) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (sx + t * vx), py - (sy + t * vy));
  };
  auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double o1 = orient(ax, ay, bx, by, cx, cy);
  const double o2 = orient(ax, ay, bx, by, dx, dy);
  const double o3 = orient(cx, cy, dx, dy, ax, ay);
  const double o4 = orient(cx, cy, dx, dy, bx, by);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return 0.0;
  }
  return std::min({point_seg(ax, ay, cx, cy, dx, dy), point_seg(bx, by, cx, cy, dx, dy),
                   point_seg(cx, cy, ax, ay, bx, by), point_seg(dx, dy, ax, ay, bx, by)});
}

// Detects a state path that comes back onto an earlier stretch of itself
// travelled with the same input level.
class ClosureDetector {
 public:
  ClosureDetector(double tol, double cell) : tol_(tol), cell_(cell) {}

  bool add(double x1, double x2, const BangBangInput& u) {
    const std::size_t idx = pts_.size();
    pts_.push_back({x1, x2, u});
    if (idx == 0) return false;
    const Pt& a = pts_[idx - 1];
    const Pt& b = pts_[idx];
    bool closed = false;
    for_cells(a, b, [&](std::int64_t key) {
      auto it = grid_.find(key);
      if (it == grid_.end()) return;
      for (std::size_t s : it->second) {
        if (s + kSkip > idx) continue;
        const Pt& c = pts_[s - 1];
        const Pt& d = pts_[s];
        if (!(d.u == b.u)) continue;
        if (segment_distance(a.x1, a.x2, b.x1, b.x2, c.x1, c.x2, d.x1, d.x2) <= tol_) closed = true;
      }
    });
    for_cells(a, b, [&](std::int64_t key) { grid_[key].push_back(idx); });
    return closed;
  }

 private:
  struct Pt {
    double x1, x2;
    BangBangInput u;
  };
  static constexpr std::size_t kSkip = 16;

  template <typename F>
  void for_cells(const Pt& a, const Pt& b, F&& f) const {
    const auto lo1 = static_cast<std::int64_t>(std::floor((std::min(a.x1, b.x1) - tol_) / cell_));
    const auto hi1 = static_cast<std::int64_t>(std::floor((std::max(a.x1, b.x1) + tol_) / cell_));
    const auto lo2 = static_cast<std::int64_t>(std::floor((std::min(a.x2, b.x2) - tol_) / cell_));
    const auto hi2 = static_cast<std::int64_t>(std::floor((std::max(a.x2, b.x2) + tol_) / cell_));
    for (auto i = lo1; i <= hi1; ++i) {
      for (auto j = lo2; j <= hi2; ++j) f(i * 4000037LL + j);
    }
  }

  double tol_;
  double cell_;
  std::vector<Pt> pts_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid_;
};

double scale_of(const Scenario& sc) {
  const double w1 = sc.box.x1_hi ? *sc.box.x1_hi : sc.numerics.window->x1_hi;
  const double w2 = sc.box.x2_hi ? *sc.box.x2_hi : sc.numerics.window->x2_hi;
  return std::hypot(w1 - sc.box.x1_lo, w2 - sc.box.x2_lo);
}

}  // namespace

bool first_backward_step_enters_interior(const TangencyPoint& tp, const Scenario& sc) {
  const Aug y0{tp.z.x1, tp.z.x2, tp.lambda_final.lambda1, tp.lambda_final.lambda2};
  const BangBangInput u = backward_mode(y0, sc);
  const Rhs<4> rhs = [&](const Aug& y) {
    const Velocity f = vector_field(state_of(y), u, sc.params);
    const Adjoint l = adjoint_rhs(state_of(y), adjoint_of(y), u, sc.params);
    return Aug{f.dx1, f.dx2, l.lambda1, l.lambda2};
  };
  const Aug y1 = rk4_step<4>(rhs, y0, -sc.numerics.step_h);
  return constraint_value(tp.constraint_id, state_of(y1), sc.box) < 0.0;
}

BarrierCurve integrate_barrier_backward(const TangencyPoint& tp, const Scenario& sc) {
  if (!tp.existence.exists) {
    throw PreconditionError("integrate_barrier_backward: tangency point z" +
                            std::to_string(tp.constraint_id) + " has no candidate barrier");
  }
  if (!tp.in_g) {
    throw PreconditionError("integrate_barrier_backward: tangency point z" +
                            std::to_string(tp.constraint_id) + " lies outside G");
  }

  const LVParams& p = sc.params;
  const IntegratorConfig& cfg = sc.numerics;
  const Aug y0{tp.z.x1, tp.z.x2, tp.lambda_final.lambda1, tp.lambda_final.lambda2};
  BangBangInput mode = backward_mode(y0, sc);

  const Rhs<4> rhs = [&](const Aug& y) {
    const Velocity f = vector_field(state_of(y), mode, p);
    const Adjoint l = adjoint_rhs(state_of(y), adjoint_of(y), mode, p);
    return Aug{f.dx1, f.dx2, l.lambda1, l.lambda2};
  };

  std::vector<Monitor<4>> monitors;
  monitors.push_back({EventKind::kLambda1Zero, 1, [](const Aug& y) { return y[2]; }, false, 0});
  monitors.push_back({EventKind::kLambda2Zero, 2, [](const Aug& y) { return y[3]; }, false, 0});
  for (int i = 1; i <= 4; ++i) {
    if (!constraint_bounded(i, sc.box)) continue;
    monitors.push_back({EventKind::kConstraintHit, i,
                        [i, &sc](const Aug& y) { return constraint_value(i, state_of(y), sc.box); },
                        true, +1});
  }
  if (!sc.box.x1_hi) {
    const double edge = cfg.window->x1_hi;
    monitors.push_back({EventKind::kWindowExit, 1, [edge](const Aug& y) { return y[0] - edge; }, true, +1});
  }
  if (!sc.box.x2_hi) {
    const double edge = cfg.window->x2_hi;
    monitors.push_back({EventKind::kWindowExit, 2, [edge](const Aug& y) { return y[1] - edge; }, true, +1});
  }
  monitors.push_back({EventKind::kDriftAbort, 0,
                      [&](const Aug& y) {
                        return hamiltonian_residual(state_of(y), adjoint_of(y), mode, p) -
                               cfg.hamiltonian_drift_tol;
                      },
                      true, +1});

  // Events that flip the mode record (forward-time) switch information.
  std::vector<SwitchEvent> switches;
  ClosureDetector closure(cfg.close_tol, std::max(100.0 * cfg.close_tol, scale_of(sc) / 256.0));
  closure.add(y0[0], y0[1], mode);

  IntegrationHooks<4> hooks;
  hooks.after_step = renormalize;
  hooks.on_event = [&](const Event<4>& ev) {
    const BangBangInput before = mode;
    mode = backward_mode(ev.y, sc);
    SwitchEvent sw;
    sw.input = ev.kind == EventKind::kLambda1Zero ? 1 : 2;
    sw.from_level = sw.input == 1 ? mode.u1 : mode.u2;
    sw.to_level = sw.input == 1 ? before.u1 : before.u2;
    sw.x = state_of(ev.y);
    sw.x.t = ev.t;
    sw.lambda = adjoint_of(ev.y);
    if (sw.from_level != sw.to_level) switches.push_back(sw);
  };
  hooks.stop = [&](double, const Aug& y) -> std::optional<EventKind> {
    if (closure.add(y[0], y[1], mode)) return EventKind::kSelfClosure;
    return std::nullopt;
  };

  const StepSettings settings{cfg.step_h, cfg.event_time_tol, cfg.max_arc_time};
  const IntegrationResult<4> res =
      integrate_with_events<4>(rhs, y0, tp.t_bar, Direction::kBackward, monitors, settings, hooks);

  if (res.termination == EventKind::kDriftAbort) {
    const auto& ev = res.events.back();
    std::ostringstream os;
    os << "barrier from z" << tp.constraint_id << ": Hamiltonian drift exceeded "
       << cfg.hamiltonian_drift_tol << " at t = " << ev.t << ", x = (" << ev.y[0] << ", " << ev.y[1]
       << ")";
    throw DriftAbort(os.str());
  }

  BarrierCurve curve;
  curve.origin = tp;
  curve.termination = res.termination;
  if (res.termination == EventKind::kConstraintHit || res.termination == EventKind::kWindowExit) {
    curve.termination_constraint = res.events.back().index;
  }
  curve.path.reserve(res.samples.size());
  for (auto it = res.samples.rbegin(); it != res.samples.rend(); ++it) {
    CurveSample s;
    s.t = it->t;
    s.x = state_of(it->y);
    s.x.t = it->t;
    s.lambda = adjoint_of(it->y);
    s.u = input_realization(s.lambda, sc.bounds);
    if (it->event >= 0) {
      const auto& ev = res.events[static_cast<std::size_t>(it->event)];
      s.event = event_tag(ev.kind, ev.index);
    }
    curve.path.push_back(std::move(s));
  }
  std::reverse(switches.begin(), switches.end());
  curve.switches = std::move(switches);
  return curve;
}

}  // namespace barrierkit

#pragma once

// Fixed-step classical Runge-Kutta integration with event localization.
//
// Events are sign changes of scalar monitor functions. A crossing detected
// across one step is refined by bisection on the sub-step length, always
// re-integrating from the start of the step with a single RK4 sub-step, so
// the localized state is as accurate as an ordinary step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/errors.hpp"

namespace barrierkit {

struct Window {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
  double x2_lo = 0.0;
  double x2_hi = 0.0;
};

struct IntegratorConfig {
  double step_h = 1e-3;
  double event_time_tol = 1e-10;
  double max_arc_time = 10.0;
  double hamiltonian_drift_tol = 1e-4;
  // Finite viewing rectangle; required when a state-box upper bound is open.
  std::optional<Window> window;

  // Geometry knobs used by filtering, assembly and membership queries.
  double filter_resolution = 1e-3;  // fraction of a walked G0 arc
  double junction_tol = 1e-6;
  double boundary_tol = 1e-4;
  double close_tol = 1e-6;

  void validate() const;
};

enum class EventKind {
  kLambda1Zero,
  kLambda2Zero,
  kConstraintHit,
  kWindowExit,
  kHorizonCap,
  kDriftAbort,
  kSelfClosure,
};

std::string to_string(EventKind kind);

enum class Direction { kForward, kBackward };

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Rhs = std::function<Vec<N>(const Vec<N>&)>;

template <std::size_t N>
struct Event {
  EventKind kind;
  int index = 0;  // constraint id for kConstraintHit, monitor slot otherwise
  double t = 0.0;
  Vec<N> y{};
};

template <std::size_t N>
struct Monitor {
  EventKind kind;
  int index = 0;
  std::function<double(const Vec<N>&)> fn;
  bool terminal = false;
  // 0: any sign change; +1: only upward crossings (value becomes > 0);
  // -1: only downward crossings.
  int direction = 0;
};

template <std::size_t N>
struct Sample {
  double t = 0.0;
  Vec<N> y{};
  int event = -1;  // index into IntegrationResult::events, or -1
};

template <std::size_t N>
struct IntegrationResult {
  std::vector<Sample<N>> samples;
  std::vector<Event<N>> events;
  EventKind termination = EventKind::kHorizonCap;
};

template <std::size_t N>
struct IntegrationHooks {
  // Applied to every accepted state (including localized event states).
  std::function<void(Vec<N>&)> after_step;
  // Called for non-terminal events; may change what the rhs closure sees.
  std::function<void(const Event<N>&)> on_event;
  // Returns a terminal event kind when integration must stop early.
  std::function<std::optional<EventKind>(double, const Vec<N>&)> stop;
};

struct StepSettings {
  double step_h = 1e-3;
  double event_time_tol = 1e-10;
  double horizon = 1.0;
};

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double a, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + a * k[i];
  return out;
}

/// One classical fourth-order Runge-Kutta step. Negative h integrates
/// backward in time. Throws NumericalError on non-finite output.
template <std::size_t N>
Vec<N> rk4_step(const Rhs<N>& rhs, const Vec<N>& y, double h) {
  const Vec<N> k1 = rhs(y);
  const Vec<N> k2 = rhs(axpy(y, 0.5 * h, k1));
  const Vec<N> k3 = rhs(axpy(y, 0.5 * h, k2));
  const Vec<N> k4 = rhs(axpy(y, h, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  if (!all_finite(out)) throw NumericalError("rk4_step: non-finite state (overflow)");
  return out;
}

namespace detail {

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace detail

/// Integrates y' = rhs(y) from y0 for `settings.horizon` time units in the
/// given direction. Backward integration runs the negated right-hand side
/// forward in reversed time; reported times decrease from t0.
///
/// A monitor whose value is exactly zero at the start is disarmed until it
/// leaves zero, except directional monitors, which treat a zero start as
/// sitting on the non-triggering side.
template <std::size_t N>
IntegrationResult<N> integrate_with_events(const Rhs<N>& rhs, const Vec<N>& y0, double t0,
                                           Direction direction,
                                           const std::vector<Monitor<N>>& monitors,
                                           const StepSettings& settings,
                                           const IntegrationHooks<N>& hooks = {}) {
  if (!(settings.step_h > 0.0)) throw ValidationError("integrate_with_events: step_h must be > 0");
  if (!(settings.event_time_tol > 0.0) || settings.event_time_tol >= settings.step_h) {
    throw ValidationError("integrate_with_events: need 0 < event_time_tol < step_h");
  }
  if (!(settings.horizon >= 0.0)) throw ValidationError("integrate_with_events: negative horizon");

  const double time_sign = direction == Direction::kForward ? 1.0 : -1.0;
  const Rhs<N> flow = direction == Direction::kForward
                          ? rhs
                          : Rhs<N>([&rhs](const Vec<N>& y) {
                              Vec<N> d = rhs(y);
                              for (auto& v : d) v = -v;
                              return d;
                            });

  IntegrationResult<N> result;
  Vec<N> y = y0;
  double tau = 0.0;
  result.samples.push_back({t0, y, -1});

  std::vector<int> last_sign(monitors.size(), 0);
  for (std::size_t j = 0; j < monitors.size(); ++j) {
    const int s = detail::sign_of(monitors[j].fn(y));
    last_sign[j] = (s == 0 && monitors[j].direction != 0) ? -monitors[j].direction : s;
  }

  auto crossed = [&](std::size_t j, int s_new) {
    const int prev = last_sign[j];
    if (prev == 0 || s_new == 0 || s_new == prev) return false;
    return monitors[j].direction == 0 || s_new == monitors[j].direction;
  };

  auto advance = [&](const Vec<N>& from, double dt) {
    Vec<N> out = rk4_step(flow, from, dt);
    if (hooks.after_step) hooks.after_step(out);
    return out;
  };

  auto finish = [&](EventKind kind, int index, const Vec<N>& ystate, double tau_at) {
    Event<N> ev{kind, index, t0 + time_sign * tau_at, ystate};
    result.events.push_back(ev);
    result.termination = kind;
    result.samples.push_back({ev.t, ystate, static_cast<int>(result.events.size()) - 1});
  };

  const double eps_time = 1e-12 * std::max(1.0, settings.horizon);
  while (settings.horizon - tau > eps_time) {
    const double h = std::min(settings.step_h, settings.horizon - tau);
    Vec<N> y_new = advance(y, h);

    // Earliest crossing among monitors that change sign over [tau, tau+h].
    std::optional<std::size_t> first;
    double first_hi = h;
    for (std::size_t j = 0; j < monitors.size(); ++j) {
      if (!crossed(j, detail::sign_of(monitors[j].fn(y_new)))) continue;
      double lo = 0.0;
      double hi = h;
      while (hi - lo > settings.event_time_tol) {
        const double mid = 0.5 * (lo + hi);
        const int s_mid = detail::sign_of(monitors[j].fn(advance(y, mid)));
        if (crossed(j, s_mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      if (!first || hi < first_hi) {
        first = j;
        first_hi = hi;
      }
    }

    if (!first) {
      tau += h;
      y = y_new;
      result.samples.push_back({t0 + time_sign * tau, y, -1});
      for (std::size_t j = 0; j < monitors.size(); ++j) {
        const int s = detail::sign_of(monitors[j].fn(y));
        if (s != 0) last_sign[j] = s;
      }
      if (hooks.stop) {
        if (auto kind = hooks.stop(t0 + time_sign * tau, y)) {
          result.events.push_back({*kind, 0, t0 + time_sign * tau, y});
          result.termination = *kind;
          result.samples.back().event = static_cast<int>(result.events.size()) - 1;
          return result;
        }
      }
      continue;
    }

    const Monitor<N>& m = monitors[*first];
    const Vec<N> y_event = advance(y, first_hi);
    const double tau_event = tau + first_hi;
    if (m.terminal) {
      finish(m.kind, m.index, y_event, tau_event);
      return result;
    }
    Event<N> ev{m.kind, m.index, t0 + time_sign * tau_event, y_event};
    result.events.push_back(ev);
    result.samples.push_back({ev.t, y_event, static_cast<int>(result.events.size()) - 1});
    for (std::size_t j = 0; j < monitors.size(); ++j) {
      const int s = detail::sign_of(monitors[j].fn(y_event));
      if (s != 0) last_sign[j] = s;
    }
    if (hooks.on_event) hooks.on_event(ev);
    tau = tau_event;
    y = y_event;
  }

  result.events.push_back({EventKind::kHorizonCap, 0, t0 + time_sign * tau, y});
  result.termination = EventKind::kHorizonCap;
  result.samples.back().event = static_cast<int>(result.events.size()) - 1;
  return result;
}

}  // namespace barrierkit

#include "barrierkit/mrpi.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace barrierkit {

namespace {

constexpr int kRays = 720;

double safe_v(double x1, double x2, const LVParams& p, const Input& u) {
  if (!(x1 > 0.0) || !(x2 > 0.0)) return std::numeric_limits<double>::infinity();
  return first_integral({x1, x2, 0.0}, p, u);
}

}  // namespace

bool mrpi_is_nontrivial(const InputBounds& b) { return b.u1_min == b.u1_max && b.u2_min == b.u2_max; }

double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(a), f(b), f(0.5 * (a + b))});
}

double orbit_period(const State& x, const Input& u, const Scenario& sc, double t_max) {
  const State e = equilibrium(u, sc.params);
  const LVParams& p = sc.params;
  const Rhs<2> rhs = [&](const Vec<2>& y) {
    const Velocity f = vector_field({y[0], y[1], 0.0}, u, p);
    return Vec<2>{f.dx1, f.dx2};
  };
  const double h = sc.numerics.step_h;
  Vec<2> y{x.x1, x.x2};
  double angle = 0.0;
  double prev = std::atan2(y[1] - e.x2, y[0] - e.x1);
  for (double t = 0.0; t < t_max; t += h) {
    const Vec<2> next = rk4_step<2>(rhs, y, h);
    const double a = std::atan2(next[1] - e.x2, next[0] - e.x1);
    double d = a - prev;
    if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    if (std::abs(angle + d) >= 2.0 * std::numbers::pi) {
      const double frac = (2.0 * std::numbers::pi - std::abs(angle)) / std::abs(d);
      return t + frac * h;
    }
    angle += d;
    prev = a;
    y = next;
  }
  throw NumericalError("orbit_period: orbit did not close within the time cap");
}

MrpiResult mrpi_region_singleton(const Scenario& sc) {
  if (!sc.box.bounded()) throw ValidationError("mrpi: the singleton construction needs a bounded state box");

  MrpiResult out;
  if (!mrpi_is_nontrivial(sc.bounds)) {
    std::ostringstream os;
    os << "U is not a singleton (u1 in [" << sc.bounds.u1_min << ", " << sc.bounds.u1_max << "], u2 in ["
       << sc.bounds.u2_min << ", " << sc.bounds.u2_max
       << "]); only the axes x1 = 0 and x2 = 0 remain robustly invariant";
    out.reason = os.str();
    return out;
  }

  const LVParams& p = sc.params;
  const Input u{sc.bounds.u1_min, sc.bounds.u2_min};
  if (!(p.alpha + u.u1 > 0.0) || !(p.gamma - u.u2 > 0.0)) {
    out.reason = "U is a singleton but alpha + u1 > 0 and gamma - u2 > 0 do not both hold: no interior "
                 "equilibrium, no closed orbit inside G";
    return out;
  }
  const State e = equilibrium(u, p);
  if (classify_region(e, sc.box) != RegionClass::kGMinus) {
    out.reason = "U is a singleton but the equilibrium lies outside the interior of G: the interior part "
                 "of the MRPI is empty; only the axes remain";
    return out;
  }

  const double x1_lo = sc.box.x1_lo;
  const double x1_hi = *sc.box.x1_hi;
  const double x2_lo = sc.box.x2_lo;
  const double x2_hi = *sc.box.x2_hi;
  constexpr double kTol = 1e-10;
  double v_star = std::numeric_limits<double>::infinity();
  auto on_x1 = [&](double c) {
    return golden_section_min([&](double s) { return safe_v(c, s, p, u); }, x2_lo, x2_hi, kTol);
  };
  auto on_x2 = [&](double c) {
    return golden_section_min([&](double s) { return safe_v(s, c, p, u); }, x1_lo, x1_hi, kTol);
  };
  v_star = std::min({on_x1(x1_lo), on_x1(x1_hi), on_x2(x2_lo), on_x2(x2_hi)});

  MrpiRegion region;
  region.u = u;
  region.equilibrium = e;
  region.v_star = v_star;
  region.boundary.reserve(kRays);
  for (int k = 0; k < kRays; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kRays;
    const double c = std::cos(th);
    const double s = std::sin(th);
    // Distance from e to the box edge along the ray; V >= V* there.
    double r_hi = std::numeric_limits<double>::infinity();
    if (c > 0.0) r_hi = std::min(r_hi, (x1_hi - e.x1) / c);
    if (c < 0.0) r_hi = std::min(r_hi, (x1_lo - e.x1) / c);
    if (s > 0.0) r_hi = std::min(r_hi, (x2_hi - e.x2) / s);
    if (s < 0.0) r_hi = std::min(r_hi, (x2_lo - e.x2) / s);
    double lo = 0.0;
    double hi = r_hi;
    while (hi - lo > 1e-12 * std::max(1.0, r_hi)) {
      const double mid = 0.5 * (lo + hi);
      if (safe_v(e.x1 + mid * c, e.x2 + mid * s, p, u) < v_star) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    region.boundary.push_back({e.x1 + lo * c, e.x2 + lo * s, 0.0});
  }
  region.period = orbit_period(region.boundary.front(), u, sc);

  std::ostringstream os;
  os << "U is a singleton: the MRPI interior is the sublevel set V < " << v_star
     << " of the first integral around e = (" << e.x1 << ", " << e.x2
     << ") (first-integral construction, not part of the existence result)";
  out.nontrivial = true;
  out.reason = os.str();
  out.region = std::move(region);
  return out;
}

}  // namespace barrierkit

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "barrierkit/mrpi.hpp"
#include "barrierkit/pipeline.hpp"
#include "barrierkit/report.hpp"
#include "barrierkit/viability.hpp"
#include "support.hpp"

namespace bk = barrierkit;
using test_support::bundled;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string str(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const bk::BarrierCurve* find_curve(const bk::PipelineResult& r, int id) {
  for (const auto& c : r.curves) {
    if (c.origin.constraint_id == id) return &c;
  }
  return nullptr;
}

Outcome tangency_reproduction() {
  const bk::Scenario sc = bundled("fig3");
  const auto tps = bk::ultimate_tangency_points(sc);
  if (tps.size() != 4) return {false, "expected 4 tangency points"};
  const double d = 5.94;
  const double e1 = std::max(std::abs(tps[0].z.x1 - 10.0), std::abs(tps[0].z.x2 - 0.926));
  const double e2 = std::max(std::abs(tps[1].z.x1 - 0.5), std::abs(tps[1].z.x2 - 1.852));
  const double e3 = std::max(std::abs(tps[2].z.x1 - 20.0 / d), std::abs(tps[2].z.x2 - 10.0));
  const double e4 = std::max(std::abs(tps[3].z.x1 - 10.0 / d), std::abs(tps[3].z.x2 - 0.5));
  const bool ok = e1 <= 1e-3 && e2 <= 1e-3 && e3 <= 1e-12 && e4 <= 1e-12;
  return {ok, "z1 err " + str(e1) + ", z2 err " + str(e2) + ", z3 err " + str(e3) + ", z4 err " + str(e4) +
                  " (reference z3 (3.086, 10), z4 (1.543, 0.5) imply delta = 6.48; closed form asserted)"};
}

Outcome existence_verdicts() {
  const bk::Scenario sc = bundled("fig3");
  const auto tps = bk::ultimate_tangency_points(sc);
  const double expect[] = {49.4, -17.03, -98.0, 14.6};
  bool ok = tps.size() == 4;
  std::string detail;
  for (std::size_t i = 0; ok && i < 4; ++i) {
    ok = ok && tps[i].existence.exists && std::abs(tps[i].existence.expression - expect[i]) <= 1e-9;
    detail += "z" + std::to_string(i + 1) + " " + str(tps[i].existence.expression) + " ";
  }
  return {ok, detail};
}

Outcome fig3_reproduction() {
  const bk::PipelineResult r = bk::run_pipeline(bundled("fig3"));
  const auto* z1 = find_curve(r, 1);
  const auto* z2 = find_curve(r, 2);
  const auto* z3 = find_curve(r, 3);
  const auto* z4 = find_curve(r, 4);
  if (!z1 || !z2 || !z3 || !z4) return {false, "missing curve"};
  const bool kept = z1->verdict.kept && z2->verdict.kept && z4->verdict.kept && !z3->verdict.kept;
  const bool reason = !z3->verdict.unusual && z3->verdict.reason.find("min_u max_i L_f g_i > 0") != std::string::npos;
  const bool z3_g1 = z3->termination == bk::EventKind::kConstraintHit && z3->termination_constraint == 1;
  const bool z2_one = z2->switches.size() == 1;
  const bool closed = r.region && !r.region->open;
  return {kept && reason && z3_g1 && z2_one && closed,
          std::string("kept z1,z2,z4 ") + (kept ? "yes" : "no") + "; z3 reason " + (reason ? "ok" : "missing") +
              "; z3 ends on g1 " + (z3_g1 ? "yes" : "no") + "; z2 switches " +
              std::to_string(z2->switches.size()) + "; closed region " + (closed ? "yes" : "no")};
}

Outcome fig2_reproduction() {
  const bk::PipelineResult r = bk::run_pipeline(bundled("fig2"));
  const bool two = r.curves.size() == 2 && find_curve(r, 2) && find_curve(r, 4);
  bool kept = two;
  std::size_t switches = 0;
  for (const auto& c : r.curves) {
    kept = kept && c.verdict.kept;
    switches += c.switches.size();
  }
  const bool open = r.region && r.region->open;
  return {two && kept && switches > 0 && open, std::to_string(r.curves.size()) + " curves, all kept " +
                                                   (kept ? "yes" : "no") + ", " + std::to_string(switches) +
                                                   " switch events, open region " + (open ? "yes" : "no")};
}

Outcome hamiltonian_zero() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig3", "fig2"}) {
    bk::Scenario sc = bundled(name);
    const bk::PipelineResult coarse = bk::run_pipeline(sc);
    sc.numerics.step_h /= 10.0;
    const bk::PipelineResult fine = bk::run_pipeline(sc);
    for (const auto& c : coarse.curves) {
      if (!c.verdict.kept) continue;
      const auto* f = find_curve(fine, c.origin.constraint_id);
      const double hc = bk::max_hamiltonian_residual(c, sc.params);
      const double hf = f ? bk::max_hamiltonian_residual(*f, sc.params) : 1.0;
      const bool pass = hc <= 1e-5 && hf * 10.0 <= hc;
      ok = ok && pass;
      detail += std::string(name) + "/z" + std::to_string(c.origin.constraint_id) + " " + str(hc) + "->" +
                str(hf) + (pass ? "" : " (!)") + "; ";
    }
  }
  return {ok, detail};
}

bk::Scenario random_scenario(std::mt19937_64& rng) {
  auto u = [&](double a, double b) { return a + (b - a) * bk::uniform01(rng); };
  bk::Scenario sc;
  sc.params = {u(0.0, 0.5), u(2.0, 15.0), u(0.0, 0.5), u(2.0, 15.0)};
  sc.box = {u(0.2, 1.0), u(6.0, 12.0), u(0.2, 1.0), u(6.0, 12.0)};
  auto inside = [&](double lo, double hi) {
    const double m = 0.05 * (hi - lo);
    double a = u(lo + m, hi - m);
    double b = u(lo + m, hi - m);
    if (a > b) std::swap(a, b);
    return std::make_pair(a, b);
  };
  const auto [a, b] = inside(sc.box.x2_lo, *sc.box.x2_hi);  // (alpha + u1)/beta heights
  const auto [c, d] = inside(sc.box.x1_lo, *sc.box.x1_hi);  // (gamma - u2)/delta abscissae
  sc.bounds = {sc.params.beta * a - sc.params.alpha, sc.params.beta * b - sc.params.alpha,
               sc.params.gamma - sc.params.delta * d, sc.params.gamma - sc.params.delta * c};
  sc.numerics.max_arc_time = 2.0;
  sc.numerics.hamiltonian_drift_tol = 1e-2;
  return sc;
}

// Random scenarios are integrated at step 1e-4: their rates reach ~2e3 / h,
// and at 1e-3 the accumulated state error moves switches up to ~1e-5 off
// their lines. The default-step figure is reported but not asserted.
Outcome switch_on_line() {
  double worst = 0.0;
  int checked = 0;
  int bad = 0;
  double worst_default = 0.0;
  auto check = [&](const bk::Scenario& sc, double* worst_out, bool assert_it) {
    for (const auto& tp : bk::ultimate_tangency_points(sc)) {
      if (!tp.existence.exists || !tp.in_g) continue;
      bk::BarrierCurve c;
      try {
        c = bk::integrate_barrier_backward(tp, sc);
      } catch (const bk::DriftAbort&) {
        continue;
      }
      for (const auto& sw : c.switches) {
        const double res = bk::switch_line_residual(sw, sc);
        *worst_out = std::max(*worst_out, res < 0.0 ? 1.0 : res);
        if (!assert_it) continue;
        ++checked;
        if (res < 0.0 || res > 1e-6) ++bad;
      }
    }
  };
  check(bundled("fig3"), &worst, true);
  check(bundled("fig2"), &worst, true);
  std::mt19937_64 rng(42);
  int scenarios = 0;
  for (int k = 0; k < 50; ++k) {
    bk::Scenario sc = random_scenario(rng);
    check(sc, &worst_default, false);
    sc.numerics.step_h = 1e-4;
    check(sc, &worst, true);
    ++scenarios;
  }
  return {bad == 0 && checked > 0, std::to_string(checked) + " switch events over 2 bundled + " +
                                       std::to_string(scenarios) + " random scenarios (step 1e-4), " +
                                       std::to_string(bad) + " off-line, worst " + str(worst) +
                                       "; random scenarios at step 1e-3: worst " + str(worst_default)};
}

Outcome mrpi_criterion() {
  const bool table = bk::mrpi_is_nontrivial({10, 10, -10, -10}) && !bk::mrpi_is_nontrivial({10, 20, -20, -10}) &&
                     !bk::mrpi_is_nontrivial({10, 10, -20, -10}) && !bk::mrpi_is_nontrivial({10, 20, -10, -10});
  const bk::Scenario sc = bundled("singleton");
  const bk::MrpiResult m = bk::mrpi_region_singleton(sc);
  if (!m.region) return {false, "no region"};
  const bk::MrpiRegion& reg = *m.region;
  const bk::InputSchedule constant{{{0.0, reg.u}}};
  const bk::SimulateOptions quiet{false};

  std::mt19937_64 rng(42);
  int inside_exits = 0;
  double max_period = 0.0;
  for (int k = 0; k < 100; ++k) {
    // Uniform in the star-shaped region: random ray, radius scaled below the level set.
    const std::size_t ray = rng() % reg.boundary.size();
    const double s = std::sqrt(bk::uniform01(rng)) * 0.999;
    const bk::State b = reg.boundary[ray];
    const bk::State x{reg.equilibrium.x1 + s * (b.x1 - reg.equilibrium.x1),
                      reg.equilibrium.x2 + s * (b.x2 - reg.equilibrium.x2), 0.0};
    const double period = bk::orbit_period(x, reg.u, sc);
    max_period = std::max(max_period, period);
    if (bk::forward_simulate(x, constant, 3.0 * period, sc, quiet).violation_time) ++inside_exits;
  }

  // Points on V = V* + 0.01 |V*| inside G.
  const double target = reg.v_star + 0.01 * std::abs(reg.v_star);
  int outside_total = 0;
  int outside_exits = 0;
  for (int k = 0; k < 36; ++k) {
    const double th = 2.0 * M_PI * k / 36.0;
    double lo = 0.0;
    double hi = 20.0;
    auto at = [&](double r) {
      return bk::State{reg.equilibrium.x1 + r * std::cos(th), reg.equilibrium.x2 + r * std::sin(th), 0.0};
    };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bk::State p = at(mid);
      const bool below = p.x1 > 0 && p.x2 > 0 && bk::first_integral(p, sc.params, reg.u) < target;
      (below ? lo : hi) = mid;
    }
    const bk::State x = at(lo);
    if (bk::classify_region(x, sc.box) != bk::RegionClass::kGMinus) continue;
    ++outside_total;
    if (bk::forward_simulate(x, constant, 3.0 * reg.period, sc, quiet).violation_time) ++outside_exits;
  }
  const bool ok = table && inside_exits == 0 && outside_total > 0 && outside_exits == outside_total;
  return {ok, std::string("truth table ") + (table ? "ok" : "wrong") + "; " + std::to_string(inside_exits) +
                  "/100 region points exit within 3 periods; " + std::to_string(outside_exits) + "/" +
                  std::to_string(outside_total) + " points at V*+1% exit"};
}

struct OffsetPoints {
  std::vector<bk::State> inward;
  std::vector<bk::State> outward;
};

// Points displaced along the loop normal by 2% of the bounding-box diagonal,
// seeded uniformly by arc length.
OffsetPoints offset_points(const bk::AdmissibleRegion& region, const bk::Scenario& sc, int count,
                           std::uint64_t seed) {
  const auto loop = region.loop();
  const std::size_t n = loop.size();
  std::vector<double> cum(n + 1, 0.0);
  double x_lo = loop[0].x1, x_hi = loop[0].x1, y_lo = loop[0].x2, y_hi = loop[0].x2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % n];
    cum[i + 1] = cum[i] + std::hypot(b.x1 - a.x1, b.x2 - a.x2);
    x_lo = std::min(x_lo, a.x1);
    x_hi = std::max(x_hi, a.x1);
    y_lo = std::min(y_lo, a.x2);
    y_hi = std::max(y_hi, a.x2);
  }
  const double offset = 0.02 * std::hypot(x_hi - x_lo, y_hi - y_lo);
  const double orient = bk::signed_area(loop) > 0.0 ? 1.0 : -1.0;

  std::mt19937_64 rng(seed);
  OffsetPoints out;
  for (int guard = 0; guard < 100000 && (static_cast<int>(out.inward.size()) < count ||
                                         static_cast<int>(out.outward.size()) < count);
       ++guard) {
    const double s = bk::uniform01(rng) * cum[n];
    const auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % n];
    const double len = cum[i + 1] - cum[i];
    if (len <= 0.0) continue;
    const double f = (s - cum[i]) / len;
    const double px = a.x1 + f * (b.x1 - a.x1);
    const double py = a.x2 + f * (b.x2 - a.x2);
    // Left normal points inward for a counter-clockwise loop.
    const double nx = -orient * (b.x2 - a.x2) / len;
    const double ny = orient * (b.x1 - a.x1) / len;
    const bk::State in{px + offset * nx, py + offset * ny, 0.0};
    const bk::State outp{px - offset * nx, py - offset * ny, 0.0};
    if (static_cast<int>(out.inward.size()) < count && bk::classify_region(in, sc.box) == bk::RegionClass::kGMinus &&
        bk::contains(region, in, sc) == bk::Membership::kInsideA) {
      out.inward.push_back(in);
    }
    if (static_cast<int>(out.outward.size()) < count &&
        bk::classify_region(outp, sc.box) != bk::RegionClass::kOutsideG &&
        bk::contains(region, outp, sc) == bk::Membership::kInGOutsideA) {
      out.outward.push_back(outp);
    }
  }
  return out;
}

Outcome membership_vs_oracle() {
  const bk::Scenario sc = bundled("fig3");
  const bk::PipelineResult r = bk::run_pipeline(sc);
  if (!r.region) return {false, "assembly failed"};
  const OffsetPoints pts = offset_points(*r.region, sc, 20, 42);
  int in_ok = 0;
  int out_ok = 0;
  std::string misses;
  for (const auto& x : pts.inward) {
    const auto rep = bk::verify_point_viability(x, sc, 10.0, 200, 42);
    if (rep.verdict == bk::ViabilityVerdict::kSomeViable) {
      ++in_ok;
    } else {
      misses += " in(" + str(x.x1) + "," + str(x.x2) + ")";
    }
  }
  for (const auto& x : pts.outward) {
    const auto rep = bk::verify_point_viability(x, sc, 10.0, 200, 42);
    if (rep.verdict == bk::ViabilityVerdict::kAllViolate) {
      ++out_ok;
    } else {
      misses += " out(" + str(x.x1) + "," + str(x.x2) + ")";
    }
  }
  const bool ok = pts.inward.size() == 20 && pts.outward.size() == 20 && in_ok == 20 && out_ok == 20;
  return {ok, std::to_string(in_ok) + "/" + std::to_string(pts.inward.size()) + " inward some_viable, " +
                  std::to_string(out_ok) + "/" + std::to_string(pts.outward.size()) + " outward all_violate" +
                  (misses.empty() ? "" : ";" + misses)};
}

Outcome numerics_quality() {
  // First integral over one period.
  const bk::Scenario sc = bundled("fig3");
  const bk::Input u{15.0, -15.0};
  const bk::State x0{2.0, 1.0, 0.0};
  const double period = bk::orbit_period(x0, u, sc);
  const bk::Rhs<2> lv = [&](const bk::Vec<2>& y) {
    const bk::Velocity f = bk::vector_field({y[0], y[1], 0.0}, u, sc.params);
    return bk::Vec<2>{f.dx1, f.dx2};
  };
  const double v0 = bk::first_integral(x0, sc.params, u);
  double drift = 0.0;
  bk::Vec<2> y{x0.x1, x0.x2};
  const double h = 1e-3;
  for (double t = 0.0; t < period; t += h) {
    y = bk::rk4_step<2>(lv, y, std::min(h, period - t));
    drift = std::max(drift, std::abs(bk::first_integral({y[0], y[1], 0.0}, sc.params, u) - v0) / std::abs(v0));
  }

  // Order on y' = y cos t style problem: y' = -2 t y, y(0) = 1 on [0, 1].
  const bk::Rhs<2> smooth = [](const bk::Vec<2>& s) { return bk::Vec<2>{-2.0 * s[1] * s[0], 1.0}; };
  auto end_error = [&](double step) {
    bk::Vec<2> s{1.0, 0.0};
    const int n = static_cast<int>(std::lround(1.0 / step));
    for (int k = 0; k < n; ++k) s = bk::rk4_step<2>(smooth, s, step);
    return std::abs(s[0] - std::exp(-1.0));
  };
  const double ratio = end_error(0.02) / end_error(0.01);

  // Analytic crossing: x' = 1 from 0 crosses 0.123456789 at that time.
  const bk::Rhs<1> unit = [](const bk::Vec<1>&) { return bk::Vec<1>{1.0}; };
  const double c = 0.123456789;
  std::vector<bk::Monitor<1>> mons{{bk::EventKind::kConstraintHit, 1, [c](const bk::Vec<1>& s) { return s[0] - c; },
                                    true, +1}};
  const auto res = bk::integrate_with_events<1>(unit, {0.0}, 0.0, bk::Direction::kForward, mons,
                                                {1e-3, 1e-10, 1.0});
  const double ev_err = res.events.empty() ? 1.0 : std::abs(res.events.back().t - c);

  const bool ok = drift <= 1e-6 && ratio >= 12.0 && ratio <= 20.0 && ev_err <= 1e-10;
  return {ok, "first-integral drift " + str(drift) + ", RK4 ratio " + str(ratio) + ", event time error " +
                  str(ev_err)};
}

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
};

Artifacts boundary_artifacts(const bk::Scenario& sc) {
  const bk::PipelineResult r = bk::run_pipeline(sc);
  Artifacts a;
  for (const auto& c : r.curves) a.files.emplace_back(bk::curve_file_name(c), bk::curve_csv(c));
  if (r.region) a.files.emplace_back("boundary.csv", bk::boundary_csv(*r.region));
  a.files.emplace_back("figure.svg", bk::svg_figure(sc, r));
  return a;
}

Outcome determinism_goldens() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig2", "fig3"}) {
    const bk::Scenario sc = bundled(name);
    const Artifacts a = boundary_artifacts(sc);
    const Artifacts b = boundary_artifacts(sc);
    bool same = a.files == b.files;
    int golden_mismatch = 0;
    for (const auto& [file, content] : a.files) {
      std::string golden;
      try {
        golden = bk::read_file(test_support::source_path("tests/golden/" + std::string(name) + "/" + file));
      } catch (const bk::ValidationError&) {
        golden = "<missing>";
      }
      if (golden != content) ++golden_mismatch;
    }
    ok = ok && same && golden_mismatch == 0;
    detail += std::string(name) + ": repeat " + (same ? "identical" : "DIFFERENT") + ", " +
              std::to_string(golden_mismatch) + " golden mismatches; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  // 0: no runtime limit
  };
  const std::vector<Criterion> criteria = {
      {1, "tangency reproduction", tangency_reproduction, 1.0},
      {2, "existence verdicts", existence_verdicts, 1.0},
      {3, "fig3 qualitative reproduction", fig3_reproduction, 10.0},
      {4, "fig2 qualitative reproduction", fig2_reproduction, 10.0},
      {5, "Hamiltonian-zero property", hamiltonian_zero, 0.0},
      {6, "switch-on-line property", switch_on_line, 0.0},
      {7, "MRPI predicate and singleton region", mrpi_criterion, 0.0},
      {8, "membership vs sampled-control oracle", membership_vs_oracle, 60.0},
      {9, "numerics quality", numerics_quality, 0.0},
      {10, "determinism and golden files", determinism_goldens, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += " [runtime limit " + str(c.limit_s) + " s exceeded]";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.2f s) - %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "barrierkit/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace barrierkit {

namespace {

constexpr double kUsableTol = 1e-9;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1);
}

// Proper crossing of segments ab and cd (interiors intersect transversally).
std::optional<Point2> proper_intersection(const Point2& a, const Point2& b, const Point2& c,
                                          const Point2& d) {
  const double o1 = cross(a, b, c);
  const double o2 = cross(a, b, d);
  const double o3 = cross(c, d, a);
  const double o4 = cross(c, d, b);
  const bool straddle_ab = (o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0);
  const bool straddle_cd = (o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0);
  if (!straddle_ab || !straddle_cd) return std::nullopt;
  const double t = o3 / (o3 - o4);
  return Point2{a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2)};
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x1 - a.x1;
  const double vy = b.x2 - a.x2;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x1 - a.x1) * vx + (p.x2 - a.x2) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x1 - (a.x1 + t * vx), p.x2 - (a.x2 + t * vy));
}

struct Vertex {
  Point2 p;
  ArcKind kind;  // tag of the segment from this vertex to the next
  int origin;
};

std::string describe_curve(int id) { return "z" + std::to_string(id); }

bool chainable(const BarrierCurve& c) {
  return c.termination == EventKind::kConstraintHit || c.termination == EventKind::kWindowExit;
}

Point2 to_point(const State& x) { return {x.x1, x.x2}; }

std::vector<Point2> vertex_points(const std::vector<Vertex>& vs) {
  std::vector<Point2> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.p);
  return out;
}

// First proper crossing between two non-adjacent segments of a closed loop.
std::optional<std::tuple<std::size_t, std::size_t, Point2>> first_crossing(const std::vector<Vertex>& vs) {
  const std::size_t n = vs.size();
  if (n < 4) return std::nullopt;
  std::vector<std::array<double, 4>> bbox(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vs[i].p;
    const Point2& b = vs[(i + 1) % n].p;
    bbox[i] = {std::min(a.x1, b.x1), std::max(a.x1, b.x1), std::min(a.x2, b.x2), std::max(a.x2, b.x2)};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (bbox[i][1] < bbox[j][0] || bbox[j][1] < bbox[i][0] || bbox[i][3] < bbox[j][2] ||
          bbox[j][3] < bbox[i][2]) {
        continue;
      }
      auto x = proper_intersection(vs[i].p, vs[(i + 1) % n].p, vs[j].p, vs[(j + 1) % n].p);
      if (x) return std::make_tuple(i, j, *x);
    }
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::kBarrierCurve: return "barrier_curve";
    case ArcKind::kConstraintSegment: return "constraint_segment";
    case ArcKind::kWindowSegment: return "window_segment";
  }
  return "unknown";
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::kInsideA: return "inside_A";
    case Membership::kOnBoundary: return "on_boundary";
    case Membership::kInGOutsideA: return "in_G_outside_A";
    case Membership::kOutsideG: return "outside_G";
  }
  return "unknown";
}

std::vector<Point2> AdmissibleRegion::loop() const {
  std::vector<Point2> out;
  for (const auto& arc : arcs) {
    for (std::size_t i = 0; i + 1 < arc.points.size(); ++i) out.push_back(arc.points[i]);
  }
  return out;
}

Perimeter::Perimeter(const Scenario& sc)
    : x1_lo_(sc.box.x1_lo),
      x1_hi_(sc.box.x1_hi ? *sc.box.x1_hi : sc.numerics.window.value().x1_hi),
      x2_lo_(sc.box.x2_lo),
      x2_hi_(sc.box.x2_hi ? *sc.box.x2_hi : sc.numerics.window.value().x2_hi) {
  const double w = x1_hi_ - x1_lo_;
  const double h = x2_hi_ - x2_lo_;
  breaks_ = {0.0, w, w + h, 2.0 * w + h, 2.0 * (w + h)};
  length_ = breaks_[4];
  edge_constraint_ = {4, sc.box.x1_hi ? 1 : 0, sc.box.x2_hi ? 3 : 0, 2};
}

double Perimeter::wrap(double s) const {
  double r = std::fmod(s, length_);
  if (r < 0.0) r += length_;
  if (r >= length_) r = 0.0;
  return r;
}

int Perimeter::edge_of(double s) const {
  const double r = wrap(s);
  for (int e = 0; e < 4; ++e) {
    if (r < breaks_[static_cast<std::size_t>(e) + 1]) return e;
  }
  return 3;
}

Point2 Perimeter::at(double s) const {
  const double r = wrap(s);
  const int e = edge_of(r);
  const double u = r - breaks_[static_cast<std::size_t>(e)];
  switch (e) {
    case 0: return {x1_lo_ + u, x2_lo_};
    case 1: return {x1_hi_, x2_lo_ + u};
    case 2: return {x1_hi_ - u, x2_hi_};
    default: return {x1_lo_, x2_hi_ - u};
  }
}

double Perimeter::param(const Point2& p) const {
  const double c1 = std::clamp(p.x1, x1_lo_, x1_hi_);
  const double c2 = std::clamp(p.x2, x2_lo_, x2_hi_);
  const std::array<double, 4> dist = {std::abs(p.x2 - x2_lo_) + std::abs(p.x1 - c1),
                                      std::abs(p.x1 - x1_hi_) + std::abs(p.x2 - c2),
                                      std::abs(p.x2 - x2_hi_) + std::abs(p.x1 - c1),
                                      std::abs(p.x1 - x1_lo_) + std::abs(p.x2 - c2)};
  const auto e = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
  switch (e) {
    case 0: return wrap(breaks_[0] + (c1 - x1_lo_));
    case 1: return breaks_[1] + (c2 - x2_lo_);
    case 2: return breaks_[2] + (x1_hi_ - c1);
    default: return wrap(breaks_[3] + (x2_hi_ - c2));
  }
}

double Perimeter::distance(const Point2& p) const {
  const Point2 q = at(param(p));
  return std::hypot(p.x1 - q.x1, p.x2 - q.x2);
}

std::vector<double> Perimeter::corners_between(double s0, int dir, double span) const {
  std::vector<std::pair<double, double>> found;
  for (int c = 0; c < 4; ++c) {
    const double corner = breaks_[static_cast<std::size_t>(c)];
    const double delta = dir > 0 ? wrap(corner - s0) : wrap(s0 - corner);
    if (delta > 0.0 && delta < span) found.emplace_back(delta, wrap(s0 + dir * delta));
  }
  std::sort(found.begin(), found.end());
  std::vector<double> out;
  for (const auto& [d, s] : found) out.push_back(s);
  return out;
}

bool usable_on_perimeter(const Point2& p, const Perimeter&, const Scenario& sc) {
  const double v = min_max_lie_derivative({p.x1, p.x2, 0.0}, sc.params, sc.bounds, sc.box);
  return v <= kUsableTol;
}

int admissible_direction(const TangencyPoint& tp, const Perimeter& per, const Scenario& sc) {
  const double s = per.param(to_point(tp.z));
  const double step = 1e-7 * per.length();
  const bool ccw = usable_on_perimeter(per.at(s + step), per, sc);
  const bool cw = usable_on_perimeter(per.at(s - step), per, sc);
  if (ccw && !cw) return +1;
  if (cw && !ccw) return -1;
  return 0;
}

void filter_candidates(std::vector<BarrierCurve>& curves, const Scenario& sc) {
  const Perimeter per(sc);
  const double tol = std::max(sc.numerics.junction_tol, 1e-9 * per.length());

  struct Info {
    double s_z = 0.0;
    double s_e = 0.0;
    int dir = 0;
    bool active = false;
  };
  std::vector<Info> info(curves.size());

  for (std::size_t c = 0; c < curves.size(); ++c) {
    BarrierCurve& curve = curves[c];
    curve.verdict = {};
    Info& in = info[c];
    const Point2 e = to_point(curve.start().x);
    if (!chainable(curve) || per.distance(e) > std::max(tol, 1e-6)) {
      curve.verdict = {false,
                       "curve from " + describe_curve(curve.origin.constraint_id) +
                           " does not end on the constraint boundary (termination: " +
                           to_string(curve.termination) + ")",
                       true};
      continue;
    }
    in.dir = admissible_direction(curve.origin, per, sc);
    if (in.dir == 0) {
      curve.verdict = {false, "admissible side of " + describe_curve(curve.origin.constraint_id) +
                                  " is ambiguous",
                       true};
      continue;
    }
    in.s_z = per.param(to_point(curve.origin.z));
    in.s_e = per.param(e);
    in.active = true;
  }

  const auto n_samples = static_cast<int>(std::ceil(1.0 / sc.numerics.filter_resolution));
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> rejected;
    for (std::size_t c = 0; c < curves.size(); ++c) {
      if (!info[c].active) continue;
      const Info& in = info[c];
      auto forward = [&](double s) { return per.wrap(in.dir * (s - in.s_z)); };

      double span = forward(in.s_e);
      std::string stop = "its own end point";
      if (span <= tol) span = per.length();
      for (std::size_t k = 0; k < curves.size(); ++k) {
        if (k == c || !info[k].active) continue;
        const double dz = forward(info[k].s_z);
        const double de = forward(info[k].s_e);
        if (dz > tol && dz < span) {
          span = dz;
          stop = describe_curve(curves[k].origin.constraint_id);
        }
        if (de > tol && de < span) {
          span = de;
          stop = "the end of the " + describe_curve(curves[k].origin.constraint_id) + " curve";
        }
      }

      for (int k = 0; k <= n_samples; ++k) {
        const double s = in.s_z + in.dir * span * static_cast<double>(k) / n_samples;
        const Point2 p = per.at(s);
        if (usable_on_perimeter(p, per, sc)) continue;
        const int edge_constraint = per.edge_constraint(per.edge_of(s));
        const double v = min_max_lie_derivative({p.x1, p.x2, 0.0}, sc.params, sc.bounds, sc.box);
        std::ostringstream os;
        os.precision(6);
        os << "adopting the curve from " << describe_curve(curves[c].origin.constraint_id)
           << " as boundary would put G0 points with min_u max_i L_f g_i > 0 on the admissible "
              "boundary: the G0 arc towards "
           << stop << " contains (" << p.x1 << ", " << p.x2 << ") on g" << edge_constraint
           << " with value " << v;
        curves[c].verdict = {false, os.str(), false};
        rejected.push_back(c);
        break;
      }
    }
    for (std::size_t c : rejected) {
      info[c].active = false;
      changed = true;
    }
  }
}

AdmissibleRegion assemble_boundary(const std::vector<BarrierCurve>& curves, const Scenario& sc) {
  const Perimeter per(sc);
  const double tol = std::max(sc.numerics.junction_tol, 1e-9 * per.length());

  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].verdict.kept) kept.push_back(c);
  }
  if (kept.empty()) throw PreconditionError("assemble_boundary: no kept curves");

  struct Info {
    double s_z, s_e;
    int dir;
  };
  std::vector<Info> info(curves.size());
  std::ostringstream diag;
  int common_dir = 0;
  for (std::size_t c : kept) {
    const BarrierCurve& curve = curves[c];
    const Point2 e = to_point(curve.start().x);
    if (per.distance(e) > std::max(tol, 1e-6)) {
      diag << describe_curve(curve.origin.constraint_id) << ": end point (" << e.x1 << ", " << e.x2
           << ") is not on the constraint boundary\n";
      throw AssemblyError("kept curve does not end on G0", diag.str());
    }
    info[c] = {per.param(to_point(curve.origin.z)), per.param(e),
               admissible_direction(curve.origin, per, sc)};
    if (info[c].dir == 0 || (common_dir != 0 && info[c].dir != common_dir)) {
      diag << describe_curve(curve.origin.constraint_id) << ": admissible side is ambiguous\n";
      throw AssemblyError("cannot determine a consistent orientation", diag.str());
    }
    common_dir = info[c].dir;
  }

  std::vector<Vertex> verts;
  std::vector<bool> visited(curves.size(), false);
  std::size_t current = kept.front();
  for (std::size_t guard = 0; guard <= kept.size(); ++guard) {
    visited[current] = true;
    const BarrierCurve& curve = curves[current];
    const int id = curve.origin.constraint_id;
    const Info& in = info[current];

    verts.push_back({per.at(in.s_e), ArcKind::kBarrierCurve, id});
    for (std::size_t i = 1; i + 1 < curve.path.size(); ++i) {
      verts.push_back({to_point(curve.path[i].x), ArcKind::kBarrierCurve, id});
    }

    auto forward = [&](double s) { return per.wrap(in.dir * (s - in.s_z)); };
    std::optional<std::size_t> next;
    double best = std::numeric_limits<double>::infinity();
    bool next_is_end = false;
    for (std::size_t k : kept) {
      const double de = forward(info[k].s_e);
      if (de > tol && de < best) {
        best = de;
        next = k;
        next_is_end = true;
      }
      if (k == current) continue;
      const double dz = forward(info[k].s_z);
      if (dz > tol && dz < best) {
        best = dz;
        next = k;
        next_is_end = false;
      }
    }
    if (!next || !next_is_end) {
      diag << "walking G0 from " << describe_curve(id) << " reaches "
           << (next ? "tangency point " + describe_curve(curves[*next].origin.constraint_id)
                    : std::string("no curve end"))
           << " before any curve end\n";
      throw AssemblyError("arcs cannot be chained into a loop", diag.str());
    }

    auto edge_tag = [&](double s) {
      const int e = per.edge_of(in.dir > 0 ? s + 1e-9 * per.length() : s - 1e-9 * per.length());
      const int g = per.edge_constraint(e);
      return g == 0 ? std::make_pair(ArcKind::kWindowSegment, 0)
                    : std::make_pair(ArcKind::kConstraintSegment, g);
    };
    auto [kind0, origin0] = edge_tag(in.s_z);
    verts.push_back({to_point(curve.origin.z), kind0, origin0});
    for (double corner : per.corners_between(in.s_z, in.dir, best)) {
      auto [kind, origin] = edge_tag(corner);
      verts.push_back({per.at(corner), kind, origin});
    }

    current = *next;
    if (current == kept.front()) break;
    if (visited[current]) {
      diag << "G0 walk re-enters " << describe_curve(curves[current].origin.constraint_id) << "\n";
      throw AssemblyError("arcs cannot be chained into a single loop", diag.str());
    }
  }
  if (current != kept.front()) throw AssemblyError("arcs cannot be chained into a loop", diag.str());
  for (std::size_t c : kept) {
    if (!visited[c]) {
      diag << describe_curve(curves[c].origin.constraint_id) << " is not on the loop\n";
      throw AssemblyError("kept curves form more than one loop", diag.str());
    }
  }

  // Crossing arcs: split the figure-eight and keep the lobe with the walking
  // orientation.
  for (int iter = 0; iter < 64; ++iter) {
    auto hit = first_crossing(verts);
    if (!hit) break;
    const auto [i, j, x] = *hit;
    std::vector<Vertex> lobe_a;
    lobe_a.push_back({x, verts[i].kind, verts[i].origin});
    for (std::size_t k = i + 1; k <= j; ++k) lobe_a.push_back(verts[k]);
    std::vector<Vertex> lobe_b;
    for (std::size_t k = j + 1; k < verts.size(); ++k) lobe_b.push_back(verts[k]);
    for (std::size_t k = 0; k <= i; ++k) lobe_b.push_back(verts[k]);
    lobe_b.push_back({x, verts[j].kind, verts[j].origin});
    const double area_a = signed_area(vertex_points(lobe_a));
    verts = (area_a * common_dir > 0.0) ? std::move(lobe_a) : std::move(lobe_b);
  }
  if (auto hit = first_crossing(verts)) {
    const auto& [i, j, x] = *hit;
    diag << "self-intersection near (" << x.x1 << ", " << x.x2 << ") between segments " << i << " and "
         << j << "\n";
    throw AssemblyError("boundary is not simple", diag.str());
  }

  // Rotate so the loop starts at a tag change, then group runs into arcs.
  const std::size_t n = verts.size();
  std::size_t start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vertex& prev = verts[(k + n - 1) % n];
    if (prev.kind != verts[k].kind || prev.origin != verts[k].origin) {
      start = k;
      break;
    }
  }
  AdmissibleRegion region;
  for (std::size_t k = 0; k < n; ++k) {
    const Vertex& v = verts[(start + k) % n];
    if (region.arcs.empty() || region.arcs.back().kind != v.kind || region.arcs.back().origin != v.origin) {
      if (!region.arcs.empty()) region.arcs.back().points.push_back(v.p);
      region.arcs.push_back({v.kind, v.origin, {}});
    }
    region.arcs.back().points.push_back(v.p);
    if (v.kind == ArcKind::kWindowSegment) region.open = true;
  }
  region.arcs.back().points.push_back(verts[start].p);
  return region;
}

double distance_to_polyline(const Point2& p, const std::vector<Point2>& pts, bool closed) {
  double best = std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return std::hypot(p.x1 - pts[0].x1, p.x2 - pts[0].x2);
  const std::size_t segs = closed ? pts.size() : pts.size() - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    best = std::min(best, point_segment_distance(p, pts[i], pts[(i + 1) % pts.size()]));
  }
  return best;
}

bool point_in_polygon(const Point2& p, const std::vector<Point2>& loop) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = loop[i];
    const Point2& b = loop[j];
    if ((a.x2 > p.x2) != (b.x2 > p.x2)) {
      const double x_cross = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
      if (p.x1 < x_cross) inside = !inside;
    }
  }
  return inside;
}

double signed_area(const std::vector<Point2>& loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = loop[i];
    const Point2& q = loop[(i + 1) % n];
    a += p.x1 * q.x2 - q.x1 * p.x2;
  }
  return 0.5 * a;
}

Membership contains(const AdmissibleRegion& region, const State& x, const Scenario& sc) {
  if (!region.assembled()) throw PreconditionError("contains: region has not been assembled");
  if (classify_region(x, sc.box) == RegionClass::kOutsideG) return Membership::kOutsideG;
  if (region.open) {
    const Window& w = *sc.numerics.window;
    if ((!sc.box.x1_hi && x.x1 > w.x1_hi) || (!sc.box.x2_hi && x.x2 > w.x2_hi)) {
      throw DomainError("contains: point lies beyond the viewing window of a truncated region");
    }
  }
  const Point2 p{x.x1, x.x2};
  for (const auto& arc : region.arcs) {
    if (arc.kind == ArcKind::kWindowSegment) continue;
    if (distance_to_polyline(p, arc.points, false) <= sc.numerics.boundary_tol) {
      return Membership::kOnBoundary;
    }
  }
  return point_in_polygon(p, region.loop()) ? Membership::kInsideA : Membership::kInGOutsideA;
}

}  // namespace barrierkit

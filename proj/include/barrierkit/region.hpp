#pragma once

// Candidate filtering, boundary assembly and membership queries for the
// admissible set.
//
// The constraint boundary G0 is handled as the perimeter of a rectangle
// (the state box, truncated at the viewing window along open directions),
// parameterized counter-clockwise by arc length starting at the lower-left
// corner. A barrier curve is a chord of this rectangle from its end point
// (where the backward integration stopped) to its tangency point.

#include <string>
#include <vector>

#include "barrierkit/barrier.hpp"

namespace barrierkit {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
  bool operator==(const Point2&) const = default;
};

enum class ArcKind { kBarrierCurve, kConstraintSegment, kWindowSegment };

std::string to_string(ArcKind kind);

struct BoundaryArc {
  ArcKind kind = ArcKind::kBarrierCurve;
  int origin = 0;  // tangency id (curves), constraint id (segments), 0 (window)
  std::vector<Point2> points;
};

struct AdmissibleRegion {
  std::vector<BoundaryArc> arcs;  // consecutive arcs share end/start points
  bool open = false;              // truncated at the viewing window

  bool assembled() const { return !arcs.empty(); }
  // Closed vertex loop without the repeated first point.
  std::vector<Point2> loop() const;
};

enum class Membership { kInsideA, kOnBoundary, kInGOutsideA, kOutsideG };

std::string to_string(Membership m);

class Perimeter {
 public:
  explicit Perimeter(const Scenario& scenario);

  double length() const { return length_; }
  Point2 at(double s) const;
  // Arc-length parameter of the perimeter point nearest to p.
  double param(const Point2& p) const;
  double distance(const Point2& p) const;
  // Edge index 0..3 (bottom, right, top, left) containing s.
  int edge_of(double s) const;
  // Constraint id of an edge, or 0 for a window edge.
  int edge_constraint(int edge) const { return edge_constraint_[static_cast<std::size_t>(edge)]; }
  // Corner parameters strictly between s0 and s0 + dir * span.
  std::vector<double> corners_between(double s0, int dir, double span) const;
  double wrap(double s) const;

 private:
  double x1_lo_, x1_hi_, x2_lo_, x2_hi_;
  double length_;
  std::array<double, 5> breaks_{};
  std::array<int, 4> edge_constraint_{};
};

/// min-max Lie derivative test on the perimeter; window points are usable.
bool usable_on_perimeter(const Point2& p, const Perimeter& perimeter, const Scenario& scenario);

/// Direction (+1 counter-clockwise, -1 clockwise) in which the G0 points
/// adjacent to a tangency point pass the min-max test; 0 when ambiguous.
int admissible_direction(const TangencyPoint& tp, const Perimeter& perimeter, const Scenario& scenario);

/// Sets the kept verdict of every curve. A curve is discarded when the G0
/// arc on its admissible side, up to the nearest end or tangency point of
/// another kept curve, contains a point where min_u max_i L_f g_i > 0.
/// Discards are re-evaluated until the kept set is stable.
void filter_candidates(std::vector<BarrierCurve>& curves, const Scenario& scenario);

/// Chains kept curves and G0 segments into one loop. Crossing barrier arcs
/// are resolved by keeping the correctly oriented lobe. Throws AssemblyError.
AdmissibleRegion assemble_boundary(const std::vector<BarrierCurve>& curves, const Scenario& scenario);

/// outside_G takes precedence, then the boundary tolerance, then ray casting.
/// Throws PreconditionError for an unassembled region and DomainError for
/// points beyond the viewing window of an open region.
Membership contains(const AdmissibleRegion& region, const State& x, const Scenario& scenario);

double distance_to_polyline(const Point2& p, const std::vector<Point2>& pts, bool closed);
bool point_in_polygon(const Point2& p, const std::vector<Point2>& loop);
double signed_area(const std::vector<Point2>& loop);

}  // namespace barrierkit

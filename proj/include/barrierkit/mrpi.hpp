#pragma once

// Maximal robust positively invariant set. It is nontrivial only for a
// singleton input set; in that case the interior part is constructed from
// the first integral V as the largest sublevel set {V < V*} that fits in G.
// That construction is an addition on top of the (non)existence result.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/model.hpp"

namespace barrierkit {

struct MrpiRegion {
  Input u;
  State equilibrium;
  double v_star = 0.0;               // min of V over the box edges
  std::vector<State> boundary;       // V = V* level set, 720 rays around e
  double period = 0.0;               // orbit period on the level set
};

struct MrpiResult {
  bool nontrivial = false;
  std::string reason;
  std::optional<MrpiRegion> region;
};

/// True iff u1_min == u1_max and u2_min == u2_max (exact comparison).
bool mrpi_is_nontrivial(const InputBounds& bounds);

/// Throws ValidationError for an unbounded box. For non-singleton bounds
/// returns the trivial verdict with its reason.
MrpiResult mrpi_region_singleton(const Scenario& scenario);

/// Time for the constant-input orbit through x to wind once around the
/// equilibrium. Throws NumericalError when no full turn occurs within t_max.
double orbit_period(const State& x, const Input& u, const Scenario& scenario, double t_max = 1e3);

/// Minimum value of a unimodal function on [a, b] by golden-section search.
double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace barrierkit

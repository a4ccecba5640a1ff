#pragma once

#include "mare/linalg.hpp"

namespace mare::lp {

struct PhaseOneResult {
  bool feasible = false;
  Vector x;                    // a feasible point when feasible
  double infeasibility = 0.0;  // optimal sum of artificial variables
  int pivots = 0;
};

/// Phase-one simplex for { x ≥ 0 : G·x ≥ h } on a dense tableau with Bland's
/// rule. Feasible iff the optimal artificial sum is ≤ tol.
PhaseOneResult find_feasible_point(const Matrix& g, const Vector& h, double tol);

}  // namespace mare::lp

#pragma once

#include "mare/linalg.hpp"
#include "mare/problem.hpp"

namespace mare {

struct OracleReport {
  Matrix phi;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  int monotonicity_violations = 0;  // entries with Xₖ₊₁ < Xₖ − τ_sign, summed over all steps
};

inline constexpr double kOracleTolerance = 1e-10;

/// Monotone fixed-point iteration X₀ = 0, A·Xₖ₊₁ + Xₖ₊₁·D = Xₖ·C·Xₖ + B.
/// Stops once residual_primal(Xₖ) ≤ tol. Running out of iterations is not
/// an error: the last iterate is returned with converged = false. Throws
/// SingularMatrix when the Sylvester operator is singular.
OracleReport fixed_point_solve(const MareProblem& p, double tol = kOracleTolerance, int max_iter = 100000);

}  // namespace mare

#include "mare/oracle.hpp"

#include "mare/adda.hpp"

namespace mare {

OracleReport fixed_point_solve(const MareProblem& p, double tol, int max_iter) {
  const SylvesterSolver sylvester(p.a(), p.d());
  const double tau = sign_tolerance(p);

  OracleReport report;
  Matrix x = Matrix::Zero(p.m(), p.n());
  report.final_residual = residual_primal(p, x);
  // At least one sweep: X₁ is the first iterate that sees the data.
  while (report.iterations < max_iter && (report.iterations == 0 || report.final_residual > tol)) {
    Matrix next = sylvester.solve(x * p.c() * x + p.b());
    report.monotonicity_violations += static_cast<int>(((next - x).array() < -tau).count());
    x = std::move(next);
    ++report.iterations;
    report.final_residual = residual_primal(p, x);
  }
  report.converged = report.final_residual <= tol;
  report.phi = std::move(x);
  return report;
}

}  // namespace mare

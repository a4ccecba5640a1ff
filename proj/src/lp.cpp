#include "mare/lp.hpp"

#include <cmath>
#include <limits>

#include "mare/error.hpp"

namespace mare::lp {

PhaseOneResult find_feasible_point(const Matrix& g, const Vector& h, double tol) {
  if (g.rows() != h.size()) throw Error(ErrorCode::ShapeMismatch, "constraint rows do not match bound length");
  require_finite(g, "constraint matrix");

  const Eigen::Index rows = g.rows();
  const Eigen::Index nx = g.cols();
  // Columns: x (nx) | surplus (rows) | artificial (rows) | rhs
  const Eigen::Index surplus0 = nx;
  const Eigen::Index art0 = nx + rows;
  const Eigen::Index total = nx + 2 * rows;
  Matrix t = Matrix::Zero(rows + 1, total + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));

  for (Eigen::Index i = 0; i < rows; ++i) {
    // G x - s + a = h, flipped so the right-hand side is nonnegative.
    const double sign = h(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(nx) = sign * g.row(i);
    t(i, surplus0 + i) = -sign;
    t(i, art0 + i) = 1.0;
    t(i, total) = sign * h(i);
    basis[static_cast<std::size_t>(i)] = art0 + i;
  }
  // Objective row holds reduced costs of min sum(a); starts as -(sum of constraint rows).
  for (Eigen::Index i = 0; i < rows; ++i) t.row(rows) -= t.row(i);
  for (Eigen::Index i = 0; i < rows; ++i) t(rows, art0 + i) = 0.0;

  const double scale = std::max(1.0, norm_max(t.topRows(rows)));
  const double eps = 1e-12 * scale;
  const int max_pivots = 50 * static_cast<int>(total + rows) + 100;

  PhaseOneResult out;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < total; ++j) {
      if (t(rows, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, total) / t(i, enter);
        if (ratio < best_ratio - eps ||
            (std::abs(ratio - best_ratio) <= eps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    // The phase-one objective is bounded below by zero, so a column with no
    // positive entry can only come from round-off.
    if (leave < 0) break;

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    if (++out.pivots > max_pivots) throw Error(ErrorCode::NoConvergence, "phase-one simplex exceeded its pivot budget");
  }

  out.x = Vector::Zero(nx);
  double artificial = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    const double value = std::max(0.0, t(i, total));
    if (b < nx) out.x(b) = value;
    if (b >= art0) artificial += value;
  }
  out.infeasibility = artificial;
  out.feasible = artificial <= tol;
  return out;
}

}  // namespace mare::lp

#include "mare/mstruct.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "mare/error.hpp"
#include "mare/lp.hpp"

namespace mare {

std::string_view to_string(MKind kind) {
  switch (kind) {
    case MKind::NotZ: return "NotZ";
    case MKind::ZNotM: return "ZNotM";
    case MKind::SingularM: return "SingularM";
    case MKind::NonsingularM: return "NonsingularM";
  }
  return "Unknown";
}

double class_tolerance(const Matrix& m) { return 1e-10 * std::max(1.0, norm1(m)); }

double null_tolerance(const Matrix& k) { return 1e-10 * norm1(k); }

double rank_tolerance(const Matrix& m) { return 1e-10 * std::max(1.0, norm1(m)); }

MClassification classify_zm(const Matrix& m) {
  require_square(m, "classify_zm input");
  require_finite(m, "classify_zm input");
  const Eigen::Index n = m.rows();

  MClassification c;
  c.tolerance = class_tolerance(m);
  c.s = m.diagonal().maxCoeff();
  c.b = c.s * Matrix::Identity(n, n) - m;

  bool z = true;
  for (Eigen::Index i = 0; i < n && z; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && m(i, j) > c.tolerance) {
        z = false;
        break;
      }
    }
  }
  if (!z) {
    c.kind = MKind::NotZ;
    c.rho_b = std::numeric_limits<double>::quiet_NaN();
    c.gap = std::numeric_limits<double>::quiet_NaN();
    return c;
  }

  // Off-diagonal round-off within tolerance is dropped before the Perron root.
  const Matrix nonneg = c.b.cwiseMax(0.0);
  c.rho_b = perron_radius(nonneg);
  c.gap = c.s - c.rho_b;
  if (std::abs(c.gap) <= c.tolerance) {
    c.kind = MKind::SingularM;
  } else if (c.gap > 0.0) {
    c.kind = MKind::NonsingularM;
  } else {
    c.kind = MKind::ZNotM;
  }
  return c;
}

RegularityReport regularity_witness(const Matrix& m, const MClassification& classification) {
  RegularityReport report;
  if (!classification.is_m()) return report;
  const Eigen::Index n = m.rows();
  const double tol = classification.tolerance;

  if (classification.kind == MKind::NonsingularM) {
    const Factorization f = lu_factor(m);
    if (!f.singular) {
      Vector v = f.solve(Matrix::Ones(n, 1));
      if ((v.array() > 0.0).all()) {
        report.regular = true;
        report.witness = std::move(v);
        return report;
      }
    }
  }

  // v = 1 + w with w ≥ 0:  M w ≥ −M·1 − τ/2.
  const Vector ones = Vector::Ones(n);
  const Vector h = -(m * ones).array() - 0.5 * tol;
  const lp::PhaseOneResult lp = lp::find_feasible_point(m, h, 1e-9 * std::max(1.0, norm1(m)));
  if (!lp.feasible) return report;
  Vector v = ones + lp.x;
  const Vector mv = m * v;
  if ((mv.array() < -tol).any()) return report;
  report.regular = true;
  report.witness = std::move(v);
  return report;
}

namespace {

bool reaches_all(const Matrix& m, bool transpose) {
  const Eigen::Index n = m.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Eigen::Index> queue{0};
  seen[0] = 1;
  Eigen::Index count = 1;
  while (!queue.empty()) {
    const Eigen::Index i = queue.front();
    queue.pop_front();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double entry = transpose ? m(j, i) : m(i, j);
      if (j == i || entry == 0.0 || seen[static_cast<std::size_t>(j)]) continue;
      seen[static_cast<std::size_t>(j)] = 1;
      ++count;
      queue.push_back(j);
    }
  }
  return count == n;
}

Vector oriented_kernel_vector(const Matrix& k, const char* side) {
  const Eigen::Index n = k.rows();
  const Elimination e = eliminate(k, rank_tolerance(k));
  if (e.rank == static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::NotSingular, std::string(side) + " kernel is trivial; K is nonsingular to tolerance");
  }
  if (e.kernel.cols() != 1) {
    throw Error(ErrorCode::AmbiguousKernel,
                std::string(side) + " kernel has dimension " + std::to_string(e.kernel.cols()));
  }
  Vector x = e.kernel.col(0);
  x /= x.lpNorm<1>();

  // One inverse-iteration pass at shift zero; vanishing pivots are replaced
  // by eps·‖K‖₁ so the solve stays finite.
  Factorization f = lu_factor(k);
  const double floor = std::max(kEps * norm1(k), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(f.upper(i, i)) < floor) f.upper(i, i) = f.upper(i, i) < 0.0 ? -floor : floor;
  }
  f.singular = false;
  Vector refined = f.solve(Matrix(x));
  if (refined.allFinite() && refined.lpNorm<1>() > 0.0) {
    refined /= refined.lpNorm<1>();
    if ((k * refined).lpNorm<Eigen::Infinity>() <= (k * x).lpNorm<Eigen::Infinity>()) x = refined;
  }

  if (x.sum() < 0.0) x = -x;
  const double tau = null_tolerance(k);
  if (x.minCoeff() < -std::max(tau, 1e-12)) {
    throw Error(ErrorCode::AmbiguousKernel, std::string(side) + " null vector has entries of both signs");
  }
  x = x.cwiseMax(0.0);
  x /= x.sum();
  return x;
}

}  // namespace

bool is_irreducible(const Matrix& m) {
  require_square(m, "is_irreducible input");
  if (m.rows() == 1) return true;
  return reaches_all(m, false) && reaches_all(m, true);
}

double drift_of(const Vector& u, const Vector& v, Eigen::Index n) {
  const Vector un = u / u.lpNorm<1>();
  const Vector vn = v / v.lpNorm<1>();
  const Eigen::Index m = u.size() - n;
  return un.head(n).dot(vn.head(n)) - un.tail(m).dot(vn.tail(m));
}

NullPair null_pair(const Matrix& k, Eigen::Index n) {
  require_square(k, "null_pair input");
  require_finite(k, "null_pair input");
  if (n < 1 || n >= k.rows()) throw Error(ErrorCode::ShapeMismatch, "split index must lie in [1, N-1]");
  const Eigen::Index m = k.rows() - n;

  NullPair p;
  p.v = oriented_kernel_vector(k, "right");
  const Matrix kt = k.transpose();
  p.u = oriented_kernel_vector(kt, "left");
  p.v1 = p.v.head(n);
  p.v2 = p.v.tail(m);
  p.u1 = p.u.head(n);
  p.u2 = p.u.tail(m);
  p.drift = p.u1.dot(p.v1) - p.u2.dot(p.v2);
  p.right_residual = (k * p.v).lpNorm<Eigen::Infinity>();
  p.left_residual = (kt * p.u).lpNorm<Eigen::Infinity>();

  const double tau = null_tolerance(k);
  if (p.right_residual > tau || p.left_residual > tau) {
    throw Error(ErrorCode::NoConvergence, "null vector residual exceeds tolerance (" +
                                              std::to_string(std::max(p.right_residual, p.left_residual)) + ")");
  }
  return p;
}

AssumptionReport zero_eigen_structure(const Matrix& hmat) {
  require_square(hmat, "zero_eigen_structure input");
  require_finite(hmat, "zero_eigen_structure input");
  const auto order = static_cast<std::size_t>(hmat.rows());

  AssumptionReport report;
  report.rank_margin = std::numeric_limits<double>::infinity();
  auto rank_of = [&report](const Matrix& p) {
    const double tol = rank_tolerance(p);
    const Elimination e = eliminate(p, tol);
    if (!e.pivots.empty()) {
      report.rank_margin = std::min(report.rank_margin, *std::min_element(e.pivots.begin(), e.pivots.end()) / tol);
    }
    return e.rank;
  };

  std::size_t rank = rank_of(hmat);
  report.geometric_multiplicity = static_cast<int>(order - rank);
  if (report.geometric_multiplicity > 0) {
    // Rank of H^k keeps dropping along Jordan chains for zero; stop once it settles.
    Matrix power = hmat;
    for (std::size_t k = 2; k <= order && rank > 0; ++k) {
      power = power * hmat;
      const std::size_t next = rank_of(power);
      if (next >= rank) break;
      rank = next;
    }
  }
  report.algebraic_multiplicity = static_cast<int>(order - rank);
  report.holds = report.geometric_multiplicity == 1 && report.algebraic_multiplicity >= 1;
  report.margin_low = report.rank_margin < 1e3;
  return report;
}

}  // namespace mare

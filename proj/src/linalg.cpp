#include "mare/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mare/error.hpp"

namespace mare {

double norm1(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double norm_max(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double norm_inf(const Vector& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has a non-finite entry");
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be square and non-empty, got " +
                                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double pivot_tolerance(const Matrix& m) { return static_cast<double>(m.rows()) * kEps * norm1(m); }

Factorization lu_factor(const Matrix& m) {
  require_square(m, "lu_factor input");
  require_finite(m, "lu_factor input");
  const Eigen::Index n = m.rows();
  Matrix work = m;
  Factorization f;
  f.permutation.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) f.permutation[static_cast<std::size_t>(i)] = static_cast<int>(i);
  f.min_pivot = std::numeric_limits<double>::infinity();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    double best = std::abs(work(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(work(i, k)) > best) {
        best = std::abs(work(i, k));
        p = i;
      }
    }
    if (p != k) {
      work.row(k).swap(work.row(p));
      std::swap(f.permutation[static_cast<std::size_t>(k)], f.permutation[static_cast<std::size_t>(p)]);
    }
    f.min_pivot = std::min(f.min_pivot, best);
    if (best == 0.0) continue;
    const double pivot = work(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = work(i, k) / pivot;
      work(i, k) = l;
      if (l != 0.0) work.row(i).tail(n - k - 1) -= l * work.row(k).tail(n - k - 1);
    }
  }

  f.lower = Matrix::Identity(n, n);
  f.upper = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j < i) {
        f.lower(i, j) = work(i, j);
      } else {
        f.upper(i, j) = work(i, j);
      }
    }
  }
  f.tolerance = pivot_tolerance(m);
  f.singular = f.min_pivot <= f.tolerance;
  return f;
}

Matrix Factorization::solve(const Matrix& rhs) const {
  const auto n = static_cast<Eigen::Index>(permutation.size());
  if (rhs.rows() != n) throw Error(ErrorCode::ShapeMismatch, "right-hand side rows do not match the factorization");
  if (singular) {
    throw Error(ErrorCode::SingularMatrix,
                "smallest pivot " + std::to_string(min_pivot) + " <= tolerance " + std::to_string(tolerance));
  }
  Matrix x(n, rhs.cols());
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = rhs.row(permutation[static_cast<std::size_t>(i)]);
  lower.triangularView<Eigen::UnitLower>().solveInPlace(x);
  upper.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix Factorization::solve_transposed(const Matrix& rhs) const {
  const auto n = static_cast<Eigen::Index>(permutation.size());
  if (rhs.rows() != n) throw Error(ErrorCode::ShapeMismatch, "right-hand side rows do not match the factorization");
  if (singular) {
    throw Error(ErrorCode::SingularMatrix,
                "smallest pivot " + std::to_string(min_pivot) + " <= tolerance " + std::to_string(tolerance));
  }
  // Mᵀ = Uᵀ Lᵀ P, so Mᵀ x = b  <=>  Uᵀ Lᵀ (P x) = b.
  Matrix y = rhs;
  upper.transpose().triangularView<Eigen::Lower>().solveInPlace(y);
  lower.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(y);
  Matrix x(n, rhs.cols());
  for (Eigen::Index i = 0; i < n; ++i) x.row(permutation[static_cast<std::size_t>(i)]) = y.row(i);
  return x;
}

double smallest_pivot(const Matrix& m) { return lu_factor(m).min_pivot; }

Matrix solve_linear(const Matrix& m, const Matrix& rhs) {
  require_finite(rhs, "right-hand side");
  if (rhs.rows() != m.rows()) throw Error(ErrorCode::ShapeMismatch, "right-hand side rows do not match");
  return lu_factor(m).solve(rhs);
}

Matrix inverse(const Matrix& m) { return solve_linear(m, Matrix::Identity(m.rows(), m.cols())); }

double spectral_radius_nonneg(const Matrix& p) {
  require_square(p, "spectral_radius_nonneg input");
  require_finite(p, "spectral_radius_nonneg input");
  if ((p.array() < 0.0).any()) throw Error(ErrorCode::InvalidInput, "spectral_radius_nonneg needs a nonnegative matrix");

  constexpr int kMaxIter = 10000;
  constexpr int kPolishIter = 2000;
  constexpr double kTol = 1e-10;

  const Eigen::Index n = p.rows();
  const double shift = 1.0 + p.diagonal().maxCoeff();
  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  double lambda = 0.0;
  double delta = std::numeric_limits<double>::infinity();
  int met_at = -1;
  for (int k = 0; k < kMaxIter; ++k) {
    Vector y = p * x + shift * x;
    // x >= 0 with unit 1-norm, so ‖(P + cI)x‖₁ is the Collatz-Wielandt style estimate of ρ + c.
    const double next = y.sum();
    delta = std::abs(next - lambda);
    lambda = next;
    x = y / next;
    if (k == 0) continue;
    if (delta <= 16.0 * kEps * lambda) break;
    if (met_at < 0 && delta <= kTol * std::max(1.0, lambda)) met_at = k;
    if (met_at >= 0 && k - met_at >= kPolishIter) break;
  }
  if (delta > kTol * std::max(1.0, lambda)) {
    throw Error(ErrorCode::NoConvergence, "power iteration did not settle (last change " + std::to_string(delta) + ")");
  }
  return std::max(0.0, lambda - shift);
}

std::vector<std::vector<Eigen::Index>> strong_components(const Matrix& m) {
  require_square(m, "strong_components input");
  const Eigen::Index n = m.rows();
  // Kosaraju: finishing order on the graph, then sweeps on the reverse graph.
  std::vector<Eigen::Index> order;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Eigen::Index root = 0; root < n; ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{root, 0}};
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      while (next < n && (next == node || m(node, next) == 0.0 || seen[static_cast<std::size_t>(next)])) ++next;
      if (next == n) {
        order.push_back(node);
        stack.pop_back();
      } else {
        seen[static_cast<std::size_t>(next)] = 1;
        stack.emplace_back(next, 0);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> components;
  std::vector<char> placed(static_cast<std::size_t>(n), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (placed[static_cast<std::size_t>(*it)]) continue;
    std::vector<Eigen::Index> component{*it};
    placed[static_cast<std::size_t>(*it)] = 1;
    for (std::size_t head = 0; head < component.size(); ++head) {
      const Eigen::Index j = component[head];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == j || m(i, j) == 0.0 || placed[static_cast<std::size_t>(i)]) continue;
        placed[static_cast<std::size_t>(i)] = 1;
        component.push_back(i);
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

double perron_radius(const Matrix& p) {
  try {
    return spectral_radius_nonneg(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence) throw;
  }
  // A defective Perron root stalls the power method. ρ(P) is the largest root
  // over the irreducible diagonal blocks, and each of those is simple.
  double rho = 0.0;
  for (const auto& component : strong_components(p)) {
    const auto size = static_cast<Eigen::Index>(component.size());
    if (size == 1) {
      rho = std::max(rho, p(component[0], component[0]));
      continue;
    }
    Matrix block(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = 0; j < size; ++j)
        block(i, j) = p(component[static_cast<std::size_t>(i)], component[static_cast<std::size_t>(j)]);
    double block_rho = 0.0;
    try {
      block_rho = spectral_radius_nonneg(block);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoConvergence) throw;
      block_rho = spectral_radius(block);
    }
    rho = std::max(rho, block_rho);
  }
  return rho;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues input");
  require_finite(m, "eigenvalues input");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m), false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "QR iteration failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const Matrix& m) {
  double rho = 0.0;
  for (const auto& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

Elimination eliminate(const Matrix& m, double tol) {
  require_finite(m, "elimination input");
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  Matrix work = m;
  std::vector<Eigen::Index> col_perm(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) col_perm[static_cast<std::size_t>(j)] = j;

  Elimination out;
  const Eigen::Index steps = std::min(rows, cols);
  Eigen::Index k = 0;
  for (; k < steps; ++k) {
    Eigen::Index pr = k;
    Eigen::Index pc = k;
    double best = -1.0;
    for (Eigen::Index i = k; i < rows; ++i) {
      for (Eigen::Index j = k; j < cols; ++j) {
        if (std::abs(work(i, j)) > best) {
          best = std::abs(work(i, j));
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= tol) {
      out.largest_rejected = std::max(best, 0.0);
      break;
    }
    work.row(k).swap(work.row(pr));
    work.col(k).swap(work.col(pc));
    std::swap(col_perm[static_cast<std::size_t>(k)], col_perm[static_cast<std::size_t>(pc)]);
    out.pivots.push_back(best);
    for (Eigen::Index i = k + 1; i < rows; ++i) {
      const double l = work(i, k) / work(k, k);
      work(i, k) = 0.0;
      if (l != 0.0) work.row(i).tail(cols - k - 1) -= l * work.row(k).tail(cols - k - 1);
    }
  }
  out.rank = static_cast<std::size_t>(k);

  const Eigen::Index r = k;
  const Eigen::Index free = cols - r;
  out.kernel = Matrix::Zero(cols, free);
  if (free > 0) {
    // Permuted system [U11 U12] [xb; xf] = 0 with xf = e_j.
    const Matrix u11 = work.topLeftCorner(r, r);
    const Matrix u12 = work.block(0, r, r, free);
    Matrix xb = -u12;
    if (r > 0) u11.triangularView<Eigen::Upper>().solveInPlace(xb);
    for (Eigen::Index j = 0; j < free; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) out.kernel(col_perm[static_cast<std::size_t>(i)], j) = xb(i, j);
      out.kernel(col_perm[static_cast<std::size_t>(r + j)], j) = 1.0;
    }
  }
  return out;
}

std::size_t numerical_rank(const Matrix& m, double tol) { return eliminate(m, tol).rank; }

Matrix kernel_basis(const Matrix& m, double tol) { return eliminate(m, tol).kernel; }

SylvesterSolver::SylvesterSolver(const Matrix& a, const Matrix& d) : m_(a.rows()), n_(d.rows()) {
  require_square(a, "Sylvester coefficient A");
  require_square(d, "Sylvester coefficient D");
  if (m_ * n_ > 2500) throw Error(ErrorCode::InvalidInput, "Sylvester solve is limited to m*n <= 2500");
  // Row-major vec: X(i,j) -> i*n + j.
  //   (A X)(i,j) = sum_k A(i,k) X(k,j);  (X D)(i,j) = sum_l X(i,l) D(l,j)
  const Eigen::Index size = m_ * n_;
  Matrix kron = Matrix::Zero(size, size);
  for (Eigen::Index i = 0; i < m_; ++i) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      const Eigen::Index row = i * n_ + j;
      for (Eigen::Index k = 0; k < m_; ++k) kron(row, k * n_ + j) += a(i, k);
      for (Eigen::Index l = 0; l < n_; ++l) kron(row, i * n_ + l) += d(l, j);
    }
  }
  lu_ = lu_factor(kron);
  if (lu_.singular) {
    throw Error(ErrorCode::SingularMatrix, "Kronecker-expanded Sylvester operator is singular (smallest pivot " +
                                               std::to_string(lu_.min_pivot) + ")");
  }
}

Matrix SylvesterSolver::solve(const Matrix& q) const {
  if (q.rows() != m_ || q.cols() != n_) throw Error(ErrorCode::ShapeMismatch, "Sylvester right-hand side shape");
  require_finite(q, "Sylvester right-hand side");
  Matrix rhs = Eigen::Map<const Matrix>(q.data(), m_ * n_, 1);
  Matrix x = lu_.solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), m_, n_);
}

Matrix sylvester_solve(const Matrix& a, const Matrix& d, const Matrix& q) { return SylvesterSolver(a, d).solve(q); }

}  // namespace mare

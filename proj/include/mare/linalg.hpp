#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mare {

/// Dense row-major storage for every coefficient block and derived matrix.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kEps = 2.220446049250313e-16;

/// Max column sum.
double norm1(const Matrix& m);
/// Max absolute entry.
double norm_max(const Matrix& m);
double norm_inf(const Vector& v);

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);
void require_square(const Matrix& m, const char* what);

/// N · eps · ‖M‖₁ for square M of order N.
double pivot_tolerance(const Matrix& m);

/// LU factorization with partial pivoting: P·M = L·U, where row i of P·M is
/// row permutation[i] of M. Elimination completes even when a pivot is zero;
/// callers consult `singular` / `min_pivot` instead.
struct Factorization {
  std::vector<int> permutation;
  Matrix lower;
  Matrix upper;
  double min_pivot = 0.0;
  double tolerance = 0.0;
  bool singular = false;

  /// Solves M·X = rhs. Throws SingularMatrix when the factorization is singular.
  Matrix solve(const Matrix& rhs) const;
  /// Solves Mᵀ·X = rhs.
  Matrix solve_transposed(const Matrix& rhs) const;
  /// Returns P·M reconstructed from the factors (L·U).
  Matrix product() const { return lower * upper; }
};

Factorization lu_factor(const Matrix& m);

/// Smallest absolute pivot of the partially pivoted LU of M.
double smallest_pivot(const Matrix& m);

Matrix solve_linear(const Matrix& m, const Matrix& rhs);
Matrix inverse(const Matrix& m);

/// Spectral radius of an entrywise nonnegative square matrix, by power
/// iteration on P + c·I with c = 1 + max diagonal, which makes the Perron
/// root the unique dominant eigenvalue. Throws NoConvergence after 10 000
/// iterations without meeting the tolerance.
double spectral_radius_nonneg(const Matrix& p);

/// Strongly connected components of the off-diagonal nonzero pattern
/// (edge i→j when M(i,j) ≠ 0), each sorted ascending.
std::vector<std::vector<Eigen::Index>> strong_components(const Matrix& m);

/// spectral_radius_nonneg, falling back to the irreducible diagonal blocks
/// when the power iteration does not settle.
double perron_radius(const Matrix& p);

/// All eigenvalues of a general real square matrix (Hessenberg reduction with
/// shifted QR). Intended for orders up to about 50.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);

/// Result of Gaussian elimination with complete pivoting.
struct Elimination {
  std::size_t rank = 0;
  std::vector<double> pivots;  // absolute values of the accepted pivots, in order
  double largest_rejected = 0.0;
  Matrix kernel;  // columns span the numerical null space; cols = M.cols - rank
};

Elimination eliminate(const Matrix& m, double tol);

/// Number of pivots exceeding tol in a complete-pivoting elimination.
std::size_t numerical_rank(const Matrix& m, double tol);

/// Kernel basis from the same elimination used by numerical_rank.
Matrix kernel_basis(const Matrix& m, double tol);

/// Solver for A·X + X·D = Q through the Kronecker-expanded linear system.
/// The expanded matrix is factored once; solve() may then be called
/// repeatedly with different right-hand sides. Desk scale only (m·n ≤ 2500).
class SylvesterSolver {
 public:
  SylvesterSolver(const Matrix& a, const Matrix& d);

  Matrix solve(const Matrix& q) const;
  double min_pivot() const { return lu_.min_pivot; }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  Factorization lu_;
};

Matrix sylvester_solve(const Matrix& a, const Matrix& d, const Matrix& q);

}  // namespace mare

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mare/linalg.hpp"
#include "mare/mstruct.hpp"

namespace mare {

/// Coefficients of X·C·X − X·D − A·X + B = 0 with A (m×m), B (m×n),
/// C (n×m), D (n×n). The minimal nonnegative solution Φ is m×n and the
/// dual solution Ψ (of Y·B·Y − Y·A − D·Y + C = 0) is n×m.
class MareProblem {
 public:
  /// Validates shapes, finiteness and the Z-pattern of K (B, C ≥ 0, A and D
  /// with nonpositive off-diagonals). Throws ShapeMismatch / NonFinite / NotZMatrix.
  MareProblem(Matrix a, Matrix b, Matrix c, Matrix d, std::string name = {});

  Eigen::Index n() const { return d_.rows(); }
  Eigen::Index m() const { return a_.rows(); }

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }
  const std::string& name() const { return name_; }

  /// K = [[D, −C], [−B, A]].
  Matrix k() const;
  /// The sign-flipped matrix [[D, −C], [B, −A]] = diag(I, −I)·K.
  Matrix hmat() const;
  /// Swaps (A, D) and (B, C): the primal of the result is this problem's dual.
  MareProblem dual() const;

 private:
  Matrix a_, b_, c_, d_;
  std::string name_;
};

enum class Regime { NonsingularK, SingularNoncritical, Critical, AssumptionFails, NotRegular };

std::string_view to_string(Regime regime);

inline constexpr double kDriftTolerance = 1e-8;

struct ProblemClass {
  MClassification k_class;
  RegularityReport regular;
  bool irreducible = false;
  AssumptionReport assumption1;
  std::optional<NullPair> nulls;
  Regime regime = Regime::NotRegular;
};

ProblemClass classify_problem(const MareProblem& p);

/// ‖XCX − XD − AX + B‖₁ / (‖X‖₁(‖C‖₁‖X‖₁ + ‖D‖₁ + ‖A‖₁) + ‖B‖₁).
double residual_primal(const MareProblem& p, const Matrix& x);
/// ‖YBY − YA − DY + C‖₁ / (‖Y‖₁(‖B‖₁‖Y‖₁ + ‖A‖₁ + ‖D‖₁) + ‖C‖₁).
double residual_dual(const MareProblem& p, const Matrix& y);

struct Check {
  int id = 0;
  std::string name;
  bool applicable = true;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Certificate {
  Matrix phi;
  Matrix psi;
  Matrix r;  // D − C·Φ
  Matrix s;  // A − B·Ψ
  double residual_primal = 0.0;
  double residual_dual = 0.0;
  double similarity_residual = 0.0;
  double rho_phi_psi = 0.0;
  MKind r_kind = MKind::NotZ;
  MKind s_kind = MKind::NotZ;
  MKind i_phi_psi_kind = MKind::NotZ;  // I_m − ΦΨ
  MKind i_psi_phi_kind = MKind::NotZ;  // I_n − ΨΦ
  double r_min_pivot = 0.0;
  double s_min_pivot = 0.0;
  bool r_singular = false;
  bool s_singular = false;
  Regime regime = Regime::NotRegular;
  std::vector<Check> checks;

  bool all_passed() const;
};

inline constexpr double kCertificateTolerance = 1e-8;
/// Smallest-pivot thresholds, relative to ‖·‖₁, for calling R or S singular
/// or nonsingular; values in between are ambiguous.
inline constexpr double kSingularPivot = 1e-8;
inline constexpr double kNonsingularPivot = 1e-4;

Certificate make_certificate(const MareProblem& p, const Matrix& phi, const Matrix& psi, const ProblemClass& cls,
                             double tol = kCertificateTolerance);
Certificate make_certificate(const MareProblem& p, const Matrix& phi, const Matrix& psi,
                             double tol = kCertificateTolerance);

}  // namespace mare

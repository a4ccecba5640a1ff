#pragma once

#include <string_view>

#include "mare/linalg.hpp"

namespace mare {

enum class MKind { NotZ, ZNotM, SingularM, NonsingularM };

std::string_view to_string(MKind kind);

/// Split M = s·I − B with s the largest diagonal entry.
struct MClassification {
  MKind kind = MKind::NotZ;
  double s = 0.0;
  double rho_b = 0.0;  // NaN for NotZ
  double gap = 0.0;    // s − ρ(B); NaN for NotZ
  double tolerance = 0.0;
  Matrix b;

  bool is_m() const { return kind == MKind::SingularM || kind == MKind::NonsingularM; }
};

struct RegularityReport {
  bool regular = false;
  Vector witness;  // strictly positive with M·witness ≥ −τ when regular
};

/// Left and right null vectors of a singular M-matrix K, each nonnegative with
/// unit 1-norm, split at index n, together with the drift u₁ᵀv₁ − u₂ᵀv₂.
struct NullPair {
  Vector u;
  Vector v;
  Vector u1, u2;
  Vector v1, v2;
  double drift = 0.0;
  double right_residual = 0.0;  // ‖K·v‖∞
  double left_residual = 0.0;   // ‖uᵀ·K‖∞
};

/// Zero-eigenvalue structure of the sign-flipped block matrix.
struct AssumptionReport {
  bool holds = false;
  int geometric_multiplicity = 0;
  int algebraic_multiplicity = 0;
  /// Smallest accepted pivot over all rank decisions, divided by the rank
  /// tolerance used for that decision.
  double rank_margin = 0.0;
  bool margin_low = false;  // rank_margin < 1e3
};

/// Numerical thresholds; each scales with max(1, ‖·‖₁) of its argument.
double class_tolerance(const Matrix& m);
double null_tolerance(const Matrix& k);
double rank_tolerance(const Matrix& m);

MClassification classify_zm(const Matrix& m);

RegularityReport regularity_witness(const Matrix& m, const MClassification& classification);

/// Strong connectivity of the off-diagonal nonzero pattern; 1×1 is irreducible.
bool is_irreducible(const Matrix& m);

NullPair null_pair(const Matrix& k, Eigen::Index n);

/// Recomputes the drift from arbitrary positive multiples of u and v after
/// rescaling both to unit 1-norm.
double drift_of(const Vector& u, const Vector& v, Eigen::Index n);

AssumptionReport zero_eigen_structure(const Matrix& hmat);

}  // namespace mare

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mare/linalg.hpp"
#include "mare/mstruct.hpp"
#include "mare/problem.hpp"

namespace mare {

enum class DoublingMode { ADDA, SDA };

struct DoublingParams {
  double alpha = 0.0;
  double beta = 0.0;
  int max_iter = 60;
  double stop_tol = 1e-14;
  DoublingMode mode = DoublingMode::ADDA;
};

/// Defaults to α = max aᵢᵢ and β = max dᵢᵢ (γ = max of the two for SDA).
/// Throws NonpositiveDiagonal when either maximum is ≤ 0 and
/// InvalidParameters when a requested pair violates α ≥ max aᵢᵢ, β ≥ max dᵢᵢ
/// (or α ≠ β in SDA mode).
DoublingParams select_parameters(const MareProblem& p, std::optional<std::pair<double, double>> requested = std::nullopt,
                                 DoublingMode mode = DoublingMode::ADDA);

/// Per-iterate record. `k` is the index of the iterate the record describes.
struct StepDiagnostics {
  int k = 0;
  double dh = 0.0;  // ‖Hₖ − Hₖ₋₁‖₁ (H₋₁ = 0)
  double dg = 0.0;
  MKind igh_kind = MKind::NotZ;  // I − GₖHₖ
  MKind ihg_kind = MKind::NotZ;  // I − HₖGₖ
  double min_pivot_igh = 0.0;
  double min_pivot_ihg = 0.0;
  int sign_violations_e = 0;  // k = 0: entries of E₀ > τ; k ≥ 1: entries of Eₖ < −τ
  int sign_violations_f = 0;
  int monotonicity_violations = 0;  // entries with Hₖ < Hₖ₋₁ − τ or Gₖ < Gₖ₋₁ − τ
};

struct DoublingState {
  int k = 0;
  // E and F are kept up to a reciprocal scalar pair (cE, F/c) once either
  // norm exceeds 1; signs and all products E·X·F are unaffected.
  Matrix e;  // n×n
  Matrix f;  // m×m
  Matrix g;  // n×m
  Matrix h;  // m×n
  double tau_sign = 0.0;
  std::vector<StepDiagnostics> diagnostics;
};

/// τ_sign = 1e-12 · max(1, ‖K‖₁).
double sign_tolerance(const MareProblem& p);

/// Builds (E₀, F₀, G₀, H₀) from A_β = A + βI, D_α = D + αI and the Schur
/// complements W = A_β − B·D_α⁻¹·C, V = D_α − C·A_β⁻¹·B. Throws SingularMatrix if any of them
/// is singular to tolerance.
DoublingState initialize(const MareProblem& p, const DoublingParams& params);

/// One doubling step. Throws IterationBreakdown when I − GH or I − HG is
/// singular to tolerance or the new iterate is not finite.
DoublingState step(const DoublingState& s);

struct SolveReport {
  Matrix phi;
  Matrix psi;
  DoublingParams params;
  ProblemClass problem_class;
  int iterations = 0;
  bool converged = false;
  std::vector<StepDiagnostics> trace;
  std::vector<Matrix> h_history;
  std::vector<Matrix> g_history;
  Certificate certificate;
  std::optional<double> theoretical_rate;
  std::optional<double> observed_rate;
  bool non_quadratic = false;
  int bound_violations = 0;  // entries with Hₖ > Φ + τ or Gₖ > Ψ + τ
  std::vector<std::string> warnings;

  /// Sum of every per-step violation count plus bound violations and any
  /// step where I − GH or I − HG failed to classify as a nonsingular M-matrix.
  int diagnostic_violations() const;
};

/// Runs the doubling iteration to convergence. Regimes other than
/// NonsingularK and SingularNoncritical are attempted and flagged with a
/// warning. Hitting max_iter does not throw: `converged` is false and the
/// last iterate is reported.
SolveReport solve(const MareProblem& p, const DoublingParams& params);

/// ρ((R + αI)⁻¹(R − βI)) · ρ((S + βI)⁻¹(S − αI)).
double theoretical_rate(const MareProblem& p, const Certificate& cert, const DoublingParams& params);

/// max over the last three usable k of ‖Xₖ − X*‖₁^(1/2ᵏ); iterates with
/// error below 100·eps are skipped. Throws InsufficientTrace when fewer
/// than two usable iterates remain.
double observed_rate(const std::vector<Matrix>& history, const Matrix& limit);

void write_trace_csv(std::ostream& out, const std::vector<StepDiagnostics>& trace);

}  // namespace mare

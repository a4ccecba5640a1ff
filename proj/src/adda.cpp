#include "mare/adda.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "mare/error.hpp"

namespace mare {

namespace {

// Consecutive steady contraction ratios needed to call a run linear.
constexpr int kLinearRun = 4;

int count_above(const Matrix& m, double threshold) { return static_cast<int>((m.array() > threshold).count()); }
int count_below(const Matrix& m, double threshold) { return static_cast<int>((m.array() < threshold).count()); }

void annotate(DoublingState& s, const Matrix& prev_h, const Matrix& prev_g) {
  const Eigen::Index n = s.e.rows();
  const Eigen::Index m = s.f.rows();
  StepDiagnostics d;
  d.k = s.k;
  d.dh = norm1(s.h - prev_h);
  d.dg = norm1(s.g - prev_g);
  const Matrix igh = Matrix::Identity(n, n) - s.g * s.h;
  const Matrix ihg = Matrix::Identity(m, m) - s.h * s.g;
  d.igh_kind = classify_zm(igh).kind;
  d.ihg_kind = classify_zm(ihg).kind;
  d.min_pivot_igh = smallest_pivot(igh);
  d.min_pivot_ihg = smallest_pivot(ihg);
  const double tau = s.tau_sign;
  if (s.k == 0) {
    d.sign_violations_e = count_above(s.e, tau);
    d.sign_violations_f = count_above(s.f, tau);
  } else {
    d.sign_violations_e = count_below(s.e, -tau);
    d.sign_violations_f = count_below(s.f, -tau);
  }
  d.monotonicity_violations = count_below(s.h - prev_h, -tau) + count_below(s.g - prev_g, -tau);
  s.diagnostics.push_back(d);
}

Factorization factor_or_break(const Matrix& m, const char* what, int k) {
  Factorization f = lu_factor(m);
  if (f.singular) {
    std::ostringstream msg;
    msg << what << " is singular at step " << k << " (smallest pivot " << f.min_pivot << ")";
    throw Error(ErrorCode::IterationBreakdown, msg.str());
  }
  return f;
}

}  // namespace

DoublingParams select_parameters(const MareProblem& p, std::optional<std::pair<double, double>> requested,
                                 DoublingMode mode) {
  const double amax = p.a().diagonal().maxCoeff();
  const double dmax = p.d().diagonal().maxCoeff();
  if (!(amax > 0.0)) throw Error(ErrorCode::NonpositiveDiagonal, "max diagonal of A is not positive");
  if (!(dmax > 0.0)) throw Error(ErrorCode::NonpositiveDiagonal, "max diagonal of D is not positive");

  DoublingParams params;
  params.mode = mode;
  if (!requested) {
    params.alpha = amax;
    params.beta = dmax;
    if (mode == DoublingMode::SDA) params.alpha = params.beta = std::max(amax, dmax);
    return params;
  }
  const auto [alpha, beta] = *requested;
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < amax || beta < dmax) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "need alpha >= " << amax << " and beta >= " << dmax << ", got (" << alpha << ", "
        << beta << ")";
    throw Error(ErrorCode::InvalidParameters, msg.str());
  }
  if (mode == DoublingMode::SDA && alpha != beta) {
    throw Error(ErrorCode::InvalidParameters, "SDA uses a single parameter: alpha must equal beta");
  }
  params.alpha = alpha;
  params.beta = beta;
  return params;
}

double sign_tolerance(const MareProblem& p) { return 1e-12 * std::max(1.0, norm1(p.k())); }

DoublingState initialize(const MareProblem& p, const DoublingParams& params) {
  const Eigen::Index n = p.n();
  const Eigen::Index m = p.m();
  const double alpha = params.alpha;
  const double beta = params.beta;
  const double sum = alpha + beta;

  // α shifts the D side and β the A side, which is what makes E₀ ≤ 0 when
  // β ≥ max dᵢᵢ and F₀ ≤ 0 when α ≥ max aᵢᵢ, and gives the rate factors
  // (R + αI)⁻¹(R − βI) and (S + βI)⁻¹(S − αI).
  const Matrix a_beta = p.a() + beta * Matrix::Identity(m, m);
  const Matrix d_alpha = p.d() + alpha * Matrix::Identity(n, n);
  const Factorization a_lu = lu_factor(a_beta);
  const Factorization d_lu = lu_factor(d_alpha);

  // W = A_β − B D_α⁻¹ C,  V = D_α − C A_β⁻¹ B
  const Matrix dinv_c = d_lu.solve(p.c());
  const Matrix w = a_beta - p.b() * dinv_c;
  const Matrix v = d_alpha - p.c() * a_lu.solve(p.b());
  const Factorization w_lu = lu_factor(w);
  const Factorization v_lu = lu_factor(v);

  DoublingState s;
  s.k = 0;
  s.tau_sign = sign_tolerance(p);
  s.e = Matrix::Identity(n, n) - sum * v_lu.solve(Matrix::Identity(n, n));
  s.f = Matrix::Identity(m, m) - sum * w_lu.solve(Matrix::Identity(m, m));
  // G₀ = (α+β) D_α⁻¹ C W⁻¹ and H₀ = (α+β) W⁻¹ B D_α⁻¹, via transposed solves for the right factors.
  s.g = sum * w_lu.solve_transposed(Matrix(dinv_c.transpose())).transpose();
  s.h = sum * d_lu.solve_transposed(Matrix(w_lu.solve(p.b()).transpose())).transpose();
  annotate(s, Matrix::Zero(m, n), Matrix::Zero(n, m));
  return s;
}

DoublingState step(const DoublingState& s) {
  const Eigen::Index n = s.e.rows();
  const Eigen::Index m = s.f.rows();
  const Factorization igh = factor_or_break(Matrix::Identity(n, n) - s.g * s.h, "I - G*H", s.k);
  const Factorization ihg = factor_or_break(Matrix::Identity(m, m) - s.h * s.g, "I - H*G", s.k);

  DoublingState next;
  next.k = s.k + 1;
  next.tau_sign = s.tau_sign;
  next.diagnostics = s.diagnostics;
  next.e = s.e * igh.solve(s.e);
  next.f = s.f * ihg.solve(s.f);
  next.g = s.g + s.e * igh.solve(s.g) * s.f;
  next.h = s.h + s.f * ihg.solve(s.h) * s.e;
  // G and H only see E and F through products E..F, so a reciprocal scaling is
  // free. Without it F overflows when S is singular and α > β (or E when R is).
  const double ne = norm1(next.e);
  const double nf = norm1(next.f);
  if (ne > 0.0 && nf > 0.0 && std::max(ne, nf) > 1.0) {
    const double scale = std::sqrt(nf / ne);
    next.e *= scale;
    next.f /= scale;
  }
  if (!next.e.allFinite() || !next.f.allFinite() || !next.g.allFinite() || !next.h.allFinite()) {
    throw Error(ErrorCode::IterationBreakdown, "non-finite iterate at step " + std::to_string(next.k));
  }
  annotate(next, s.h, s.g);
  return next;
}

int SolveReport::diagnostic_violations() const {
  int total = bound_violations;
  for (const auto& d : trace) {
    total += d.sign_violations_e + d.sign_violations_f + d.monotonicity_violations;
    if (d.igh_kind != MKind::NonsingularM) ++total;
    if (d.ihg_kind != MKind::NonsingularM) ++total;
  }
  return total;
}

double theoretical_rate(const MareProblem& p, const Certificate& cert, const DoublingParams& params) {
  const Eigen::Index n = p.n();
  const Eigen::Index m = p.m();
  const Matrix in = Matrix::Identity(n, n);
  const Matrix im = Matrix::Identity(m, m);
  const Matrix r_factor = solve_linear(cert.r + params.alpha * in, cert.r - params.beta * in);
  const Matrix s_factor = solve_linear(cert.s + params.beta * im, cert.s - params.alpha * im);
  return spectral_radius(r_factor) * spectral_radius(s_factor);
}

double observed_rate(const std::vector<Matrix>& history, const Matrix& limit) {
  std::vector<double> usable;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const double err = norm1(history[k] - limit);
    if (err < 100.0 * kEps) continue;
    usable.push_back(std::pow(err, 1.0 / std::ldexp(1.0, static_cast<int>(k))));
  }
  if (usable.size() < 2) {
    throw Error(ErrorCode::InsufficientTrace, std::to_string(usable.size()) + " usable iterate(s) in the trace");
  }
  const auto first = usable.size() > 3 ? usable.end() - 3 : usable.begin();
  return *std::max_element(first, usable.end());
}

SolveReport solve(const MareProblem& p, const DoublingParams& params) {
  SolveReport report;
  report.params = params;
  report.problem_class = classify_problem(p);
  const Regime regime = report.problem_class.regime;
  if (regime != Regime::NonsingularK && regime != Regime::SingularNoncritical) {
    report.warnings.push_back("regime " + std::string(to_string(regime)) +
                              ": convergence of the doubling iteration is not guaranteed");
  }

  DoublingState s = initialize(p, params);
  report.h_history.push_back(s.h);
  report.g_history.push_back(s.g);
  while (s.k < params.max_iter) {
    DoublingState next = step(s);
    const double dh = next.diagnostics.back().dh;
    const double dg = next.diagnostics.back().dg;
    s = std::move(next);
    report.h_history.push_back(s.h);
    report.g_history.push_back(s.g);
    if (dh <= params.stop_tol * std::max(1.0, norm1(s.h)) && dg <= params.stop_tol * std::max(1.0, norm1(s.g))) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) report.warnings.push_back("MaxIterations: stopped after " + std::to_string(s.k) + " steps");

  report.iterations = s.k;
  report.phi = s.h;
  report.psi = s.g;
  report.trace = s.diagnostics;

  const double tau = s.tau_sign;
  for (const auto& h : report.h_history) report.bound_violations += count_above(h - report.phi, tau);
  for (const auto& g : report.g_history) report.bound_violations += count_above(g - report.psi, tau);

  report.certificate = make_certificate(p, report.phi, report.psi, report.problem_class);
  try {
    report.theoretical_rate = theoretical_rate(p, report.certificate, params);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("theoretical rate unavailable: ") + e.what());
  }
  try {
    report.observed_rate = observed_rate(report.h_history, report.phi);
  } catch (const Error&) {
    try {
      report.observed_rate = observed_rate(report.g_history, report.psi);
    } catch (const Error&) {
      // Both sequences hit their limits within a couple of steps.
    }
  }

  // Linear convergence shows up as a run of update ratios that hold steady;
  // under quadratic convergence each ratio is roughly the square of the last.
  std::vector<double> deltas;
  for (const auto& d : report.trace) {
    const double delta = std::max(d.dh, d.dg);
    if (d.k > 0 && delta > 100.0 * kEps) deltas.push_back(delta);
  }
  if (!report.converged) {
    report.non_quadratic = true;
  } else {
    int run = 0;
    double previous = 0.0;
    for (std::size_t i = 1; i < deltas.size(); ++i) {
      const double q = deltas[i] / deltas[i - 1];
      const bool steady = q >= 0.25 && q <= 1.0 && (previous == 0.0 || q >= std::pow(previous, 1.5));
      run = steady ? run + 1 : 0;
      previous = q;
      if (run >= kLinearRun) report.non_quadratic = true;
    }
  }
  if (report.non_quadratic) report.warnings.push_back("convergence is not quadratic");
  if (report.diagnostic_violations() > 0) {
    report.warnings.push_back(std::to_string(report.diagnostic_violations()) + " diagnostic violation(s) in the trace");
  }
  return report;
}

void write_trace_csv(std::ostream& out, const std::vector<StepDiagnostics>& trace) {
  out << "k,dH,dG,minpivot_IGH,minpivot_IHG,sign_violations_E,sign_violations_F,monotonicity_violations\n";
  out << std::setprecision(17);
  for (const auto& d : trace) {
    out << d.k << ',' << d.dh << ',' << d.dg << ',' << d.min_pivot_igh << ',' << d.min_pivot_ihg << ','
        << d.sign_violations_e << ',' << d.sign_violations_f << ',' << d.monotonicity_violations << '\n';
  }
}

}  // namespace mare

#include "mare/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mare/error.hpp"

namespace mare {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + ", got " + shape(m));
  }
}

bool offdiag_nonpositive(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) > 0.0) return false;
    }
  }
  return true;
}

double safe_denominator(double x) { return std::max(x, kEps); }

Check make_check(int id, std::string name, bool passed, double value, double threshold, std::string detail = {}) {
  Check c;
  c.id = id;
  c.name = std::move(name);
  c.passed = passed;
  c.value = value;
  c.threshold = threshold;
  c.detail = std::move(detail);
  return c;
}

Check not_applicable(int id, std::string name, std::string detail) {
  Check c;
  c.id = id;
  c.name = std::move(name);
  c.applicable = false;
  c.passed = true;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

MareProblem::MareProblem(Matrix a, Matrix b, Matrix c, Matrix d, std::string name)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), name_(std::move(name)) {
  const Eigen::Index m = a_.rows();
  const Eigen::Index n = d_.rows();
  if (m < 1 || n < 1) throw Error(ErrorCode::ShapeMismatch, "A and D must be non-empty");
  expect_shape(a_, m, m, "A");
  expect_shape(b_, m, n, "B");
  expect_shape(c_, n, m, "C");
  expect_shape(d_, n, n, "D");
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
  require_finite(d_, "D");
  if ((b_.array() < 0.0).any()) throw Error(ErrorCode::NotZMatrix, "B has a negative entry");
  if ((c_.array() < 0.0).any()) throw Error(ErrorCode::NotZMatrix, "C has a negative entry");
  if (!offdiag_nonpositive(a_)) throw Error(ErrorCode::NotZMatrix, "A has a positive off-diagonal entry");
  if (!offdiag_nonpositive(d_)) throw Error(ErrorCode::NotZMatrix, "D has a positive off-diagonal entry");
}

Matrix MareProblem::k() const {
  const Eigen::Index n = this->n();
  const Eigen::Index m = this->m();
  Matrix k(n + m, n + m);
  k << d_, -c_, -b_, a_;
  return k;
}

Matrix MareProblem::hmat() const {
  const Eigen::Index n = this->n();
  const Eigen::Index m = this->m();
  Matrix h(n + m, n + m);
  h << d_, -c_, b_, -a_;
  return h;
}

MareProblem MareProblem::dual() const {
  return MareProblem(d_, c_, b_, a_, name_.empty() ? std::string{} : name_ + " (dual)");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::NonsingularK: return "NonsingularK";
    case Regime::SingularNoncritical: return "SingularNoncritical";
    case Regime::Critical: return "Critical";
    case Regime::AssumptionFails: return "AssumptionFails";
    case Regime::NotRegular: return "NotRegular";
  }
  return "Unknown";
}

ProblemClass classify_problem(const MareProblem& p) {
  const Matrix k = p.k();
  ProblemClass out;
  out.k_class = classify_zm(k);
  out.irreducible = is_irreducible(k);
  out.assumption1 = zero_eigen_structure(p.hmat());
  if (out.k_class.is_m()) out.regular = regularity_witness(k, out.k_class);

  const bool singular = out.k_class.kind == MKind::SingularM;
  if (singular && out.assumption1.holds) {
    try {
      out.nulls = null_pair(k, p.n());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AmbiguousKernel && e.code() != ErrorCode::NotSingular) throw;
    }
  }

  if (out.k_class.kind == MKind::NonsingularM) {
    out.regime = Regime::NonsingularK;
  } else if (!singular || !out.regular.regular) {
    out.regime = Regime::NotRegular;
  } else if (!out.assumption1.holds || !out.nulls) {
    out.regime = Regime::AssumptionFails;
  } else if (std::abs(out.nulls->drift) > kDriftTolerance) {
    out.regime = Regime::SingularNoncritical;
  } else {
    out.regime = Regime::Critical;
  }
  return out;
}

double residual_primal(const MareProblem& p, const Matrix& x) {
  if (x.rows() != p.m() || x.cols() != p.n()) throw Error(ErrorCode::ShapeMismatch, "X must be m x n, got " + shape(x));
  require_finite(x, "X");
  const Matrix res = x * p.c() * x - x * p.d() - p.a() * x + p.b();
  const double nx = norm1(x);
  const double den = nx * (norm1(p.c()) * nx + norm1(p.d()) + norm1(p.a())) + norm1(p.b());
  return norm1(res) / safe_denominator(den);
}

double residual_dual(const MareProblem& p, const Matrix& y) {
  if (y.rows() != p.n() || y.cols() != p.m()) throw Error(ErrorCode::ShapeMismatch, "Y must be n x m, got " + shape(y));
  require_finite(y, "Y");
  const Matrix res = y * p.b() * y - y * p.a() - p.d() * y + p.c();
  const double ny = norm1(y);
  const double den = ny * (norm1(p.b()) * ny + norm1(p.a()) + norm1(p.d())) + norm1(p.c());
  return norm1(res) / safe_denominator(den);
}

bool Certificate::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Certificate make_certificate(const MareProblem& p, const Matrix& phi_in, const Matrix& psi_in, double tol) {
  return make_certificate(p, phi_in, psi_in, classify_problem(p), tol);
}

Certificate make_certificate(const MareProblem& p, const Matrix& phi_in, const Matrix& psi_in, const ProblemClass& cls,
                             double tol) {
  const Eigen::Index n = p.n();
  const Eigen::Index m = p.m();
  if (phi_in.rows() != m || phi_in.cols() != n) throw Error(ErrorCode::ShapeMismatch, "Phi must be m x n");
  if (psi_in.rows() != n || psi_in.cols() != m) throw Error(ErrorCode::ShapeMismatch, "Psi must be n x m");
  require_finite(phi_in, "Phi");
  require_finite(psi_in, "Psi");

  Certificate cert;
  cert.regime = cls.regime;
  const double tau = null_tolerance(p.k());
  const double most_negative = std::min(phi_in.minCoeff(), psi_in.minCoeff());
  cert.checks.push_back(make_check(0, "nonnegative", most_negative >= -tau, most_negative, -tau,
                                   "Phi and Psi entrywise >= -tau_null before clamping"));
  cert.phi = phi_in.cwiseMax(0.0);
  cert.psi = psi_in.cwiseMax(0.0);
  cert.r = p.d() - p.c() * cert.phi;
  cert.s = p.a() - p.b() * cert.psi;

  // (1) residuals
  cert.residual_primal = residual_primal(p, cert.phi);
  cert.residual_dual = residual_dual(p, cert.psi);
  const double worst = std::max(cert.residual_primal, cert.residual_dual);
  cert.checks.push_back(make_check(1, "residuals", worst <= tol, worst, tol, "max(residual_primal, residual_dual)"));

  // (2) closing matrices are regular M-matrices
  const MClassification rc = classify_zm(cert.r);
  const MClassification sc = classify_zm(cert.s);
  cert.r_kind = rc.kind;
  cert.s_kind = sc.kind;
  const bool r_regular = rc.is_m() && regularity_witness(cert.r, rc).regular;
  const bool s_regular = sc.is_m() && regularity_witness(cert.s, sc).regular;
  {
    std::ostringstream detail;
    detail << "R " << to_string(rc.kind) << (r_regular ? " regular" : " not regular") << ", S " << to_string(sc.kind)
           << (s_regular ? " regular" : " not regular");
    cert.checks.push_back(make_check(2, "closing_matrices_regular_m", r_regular && s_regular,
                                     std::min(rc.is_m() ? rc.gap : -1.0, sc.is_m() ? sc.gap : -1.0), 0.0,
                                     detail.str()));
  }

  // (3) H·W = W·diag(R, −S) with W = [[I, Ψ], [Φ, I]]
  Matrix w(n + m, n + m);
  w << Matrix::Identity(n, n), cert.psi, cert.phi, Matrix::Identity(m, m);
  Matrix blocks = Matrix::Zero(n + m, n + m);
  blocks.topLeftCorner(n, n) = cert.r;
  blocks.bottomRightCorner(m, m) = -cert.s;
  const Matrix h = p.hmat();
  cert.similarity_residual = norm1(h * w - w * blocks) / safe_denominator(norm1(h));
  cert.checks.push_back(make_check(3, "similarity", cert.similarity_residual <= tol, cert.similarity_residual, tol));

  // (4) ρ(ΦΨ) < 1, i.e. I − ΦΨ and I − ΨΦ nonsingular M-matrices
  const Matrix phipsi = cert.phi * cert.psi;
  const Matrix psiphi = cert.psi * cert.phi;
  cert.rho_phi_psi = perron_radius(phipsi);
  cert.i_phi_psi_kind = classify_zm(Matrix::Identity(m, m) - phipsi).kind;
  cert.i_psi_phi_kind = classify_zm(Matrix::Identity(n, n) - psiphi).kind;
  if (cls.regime == Regime::NonsingularK || cls.regime == Regime::SingularNoncritical) {
    const bool ok = cert.rho_phi_psi < 1.0 && cert.i_phi_psi_kind == MKind::NonsingularM &&
                    cert.i_psi_phi_kind == MKind::NonsingularM;
    cert.checks.push_back(make_check(4, "i_minus_phi_psi_nonsingular", ok, cert.rho_phi_psi, 1.0,
                                     "I-PhiPsi " + std::string(to_string(cert.i_phi_psi_kind)) + ", I-PsiPhi " +
                                         std::string(to_string(cert.i_psi_phi_kind))));
  } else {
    cert.checks.push_back(not_applicable(4, "i_minus_phi_psi_nonsingular",
                                         "regime " + std::string(to_string(cls.regime)) + "; I-PhiPsi " +
                                             std::string(to_string(cert.i_phi_psi_kind))));
  }

  // (5) exactly one of R, S singular; pivots are measured against the operands
  // of D − CΦ and A − BΨ since a singular R or S can be entirely cancelled away
  const double rn = norm1(p.d()) + norm1(p.c()) * norm1(cert.phi);
  const double sn = norm1(p.a()) + norm1(p.b()) * norm1(cert.psi);
  cert.r_min_pivot = smallest_pivot(cert.r);
  cert.s_min_pivot = smallest_pivot(cert.s);
  cert.r_singular = cert.r_min_pivot <= kSingularPivot * rn;
  cert.s_singular = cert.s_min_pivot <= kSingularPivot * sn;
  if (cls.regime == Regime::SingularNoncritical) {
    const bool r_clear = cert.r_min_pivot >= kNonsingularPivot * rn && rn > 0.0;
    const bool s_clear = cert.s_min_pivot >= kNonsingularPivot * sn && sn > 0.0;
    const bool ok = (cert.r_singular && s_clear) || (cert.s_singular && r_clear);
    std::ostringstream detail;
    detail << (cert.r_singular ? "R singular" : (r_clear ? "R nonsingular" : "R ambiguous")) << ", "
           << (cert.s_singular ? "S singular" : (s_clear ? "S nonsingular" : "S ambiguous"));
    cert.checks.push_back(make_check(5, "exactly_one_singular", ok,
                                     std::min(cert.r_min_pivot / std::max(rn, kEps), cert.s_min_pivot / std::max(sn, kEps)),
                                     kSingularPivot, detail.str()));
  } else {
    cert.checks.push_back(not_applicable(5, "exactly_one_singular", "regime " + std::string(to_string(cls.regime))));
  }
  return cert;
}

}  // namespace mare

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "mare/adda.hpp"
#include "mare/error.hpp"
#include "mare/probgen.hpp"

using namespace mare;
using mare::testing::mat;
using mare::testing::scalar;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected mare::Error";
  return ErrorCode::InvalidInput;
}

const double kGolden = (3.0 - std::sqrt(5.0)) / 2.0;

MareProblem scalar_problem(double a, double b, double c, double d) {
  return MareProblem(scalar(a), scalar(b), scalar(c), scalar(d));
}

MareProblem reducible_problem() {
  return MareProblem(mat({{1, -1}, {-1, 1}}), Matrix::Zero(2, 1), mat({{1, 1}}), mat({{2}}));
}

MareProblem suite_problem(int index, Regime regime) {
  FamilySpec spec;
  spec.regime_target = regime;
  spec.n = 1 + index % 6;
  spec.m = 1 + (index * 5) % 7;
  spec.seed = static_cast<std::uint64_t>(1000 + index);
  spec.density = 0.3 + 0.1 * (index % 7);
  return generate(spec);
}

}  // namespace

TEST(SelectParameters, OptimalDefault) {
  const DoublingParams p = select_parameters(scalar_problem(2, 1, 1, 1));
  EXPECT_EQ(p.alpha, 2.0);
  EXPECT_EQ(p.beta, 1.0);
  EXPECT_EQ(p.mode, DoublingMode::ADDA);
  EXPECT_EQ(p.max_iter, 60);
  EXPECT_EQ(p.stop_tol, 1e-14);
}

TEST(SelectParameters, MatrixDiagonals) {
  const DoublingParams p = select_parameters(reducible_problem());
  EXPECT_EQ(p.alpha, 1.0);
  EXPECT_EQ(p.beta, 2.0);
}

TEST(SelectParameters, Requested) {
  const MareProblem prob = scalar_problem(2, 1, 1, 1);
  const DoublingParams p = select_parameters(prob, std::make_pair(3.0, 2.0));
  EXPECT_EQ(p.alpha, 3.0);
  EXPECT_EQ(p.beta, 2.0);
  EXPECT_EQ(code_of([&] { select_parameters(prob, std::make_pair(1.0, 2.0)); }), ErrorCode::InvalidParameters);
  EXPECT_EQ(code_of([&] { select_parameters(prob, std::make_pair(2.0, 0.5)); }), ErrorCode::InvalidParameters);
  EXPECT_EQ(code_of([&] { select_parameters(prob, std::make_pair(NAN, 2.0)); }), ErrorCode::InvalidParameters);
}

TEST(SelectParameters, NonpositiveDiagonal) {
  EXPECT_EQ(code_of([] { select_parameters(scalar_problem(0, 1, 1, 1)); }), ErrorCode::NonpositiveDiagonal);
  EXPECT_EQ(code_of([] { select_parameters(scalar_problem(1, 1, 1, 0)); }), ErrorCode::NonpositiveDiagonal);
}

TEST(SelectParameters, SdaUsesCommonParameter) {
  const MareProblem prob = scalar_problem(2, 1, 1, 1);
  const DoublingParams p = select_parameters(prob, std::nullopt, DoublingMode::SDA);
  EXPECT_EQ(p.alpha, 2.0);
  EXPECT_EQ(p.beta, 2.0);
  EXPECT_EQ(code_of([&] { select_parameters(prob, std::make_pair(3.0, 2.0), DoublingMode::SDA); }),
            ErrorCode::InvalidParameters);
  EXPECT_NO_THROW(select_parameters(prob, std::make_pair(3.0, 3.0), DoublingMode::SDA));
}

TEST(Initialize, CriticalScalar) {
  const DoublingState s = initialize(scalar_problem(1, 1, 1, 1), select_parameters(scalar_problem(1, 1, 1, 1)));
  EXPECT_EQ(s.k, 0);
  EXPECT_NEAR(s.e(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.f(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.g(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.h(0, 0), 2.0 / 3.0, 1e-15);
  ASSERT_EQ(s.diagnostics.size(), 1u);
  EXPECT_EQ(s.diagnostics[0].sign_violations_e, 0);
}

TEST(Initialize, ZeroBGivesZeroH) {
  const MareProblem p = reducible_problem();
  const DoublingState s = initialize(p, select_parameters(p));
  EXPECT_EQ(s.h, Matrix::Zero(2, 1));
  EXPECT_LE(s.e.maxCoeff(), s.tau_sign);
  EXPECT_LE(s.f.maxCoeff(), s.tau_sign);
}

TEST(Initialize, SdaMatchesAddaWithEqualParameters) {
  const MareProblem p = scalar_problem(2, 1, 1, 1);
  const DoublingState sda = initialize(p, select_parameters(p, std::nullopt, DoublingMode::SDA));
  const DoublingState adda = initialize(p, select_parameters(p, std::make_pair(2.0, 2.0)));
  EXPECT_EQ(sda.e, adda.e);
  EXPECT_EQ(sda.f, adda.f);
  EXPECT_EQ(sda.g, adda.g);
  EXPECT_EQ(sda.h, adda.h);
}

TEST(Initialize, ScalarNonsingularSigns) {
  // α = 2, β = 1: A + β = 3, D + α = 3, W = V = 3 − 1/3 = 8/3
  const DoublingState s = initialize(scalar_problem(2, 1, 1, 1), select_parameters(scalar_problem(2, 1, 1, 1)));
  EXPECT_NEAR(s.e(0, 0), 1.0 - 3.0 * 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(s.h(0, 0), 3.0 * (3.0 / 8.0) * (1.0 / 3.0), 1e-15);
  EXPECT_LE(s.e(0, 0), 0.0);
  EXPECT_LE(s.f(0, 0), 0.0);
}

TEST(Step, CriticalRecurrence) {
  const MareProblem p = scalar_problem(1, 1, 1, 1);
  DoublingState s = initialize(p, select_parameters(p));
  s = step(s);
  EXPECT_EQ(s.k, 1);
  EXPECT_NEAR(s.e(0, 0), 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(s.f(0, 0), 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(s.g(0, 0), 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(s.h(0, 0), 4.0 / 5.0, 1e-15);
  s = step(s);
  EXPECT_NEAR(s.e(0, 0), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(s.h(0, 0), 8.0 / 9.0, 1e-15);
  ASSERT_EQ(s.diagnostics.size(), 3u);
  EXPECT_NEAR(s.diagnostics[1].dh, 4.0 / 5.0 - 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.diagnostics[2].dh, 8.0 / 9.0 - 4.0 / 5.0, 1e-15);
  for (const auto& d : s.diagnostics) {
    EXPECT_EQ(d.igh_kind, MKind::NonsingularM);
    EXPECT_EQ(d.monotonicity_violations, 0);
  }
}

TEST(Step, ZeroGSpecialization) {
  DoublingState s;
  s.e = mat({{0.2, 0.1}, {0.0, 0.3}});
  s.f = mat({{0.4}});
  s.g = Matrix::Zero(2, 1);
  s.h = mat({{0.5, 0.25}});
  s.tau_sign = 1e-12;
  const DoublingState next = step(s);
  EXPECT_LE(norm1(next.e - s.e * s.e), 1e-16);
  EXPECT_LE(norm1(next.h - (s.h + s.f * s.h * s.e)), 1e-16);
  EXPECT_LE(norm1(next.f - s.f * s.f), 1e-16);
  EXPECT_EQ(next.g, s.g);
}

TEST(Step, SingularIMinusGHBreaksDown) {
  DoublingState s;
  s.e = scalar(0.1);
  s.f = scalar(0.1);
  s.g = scalar(1.0);
  s.h = scalar(1.0);
  s.tau_sign = 1e-12;
  EXPECT_EQ(code_of([&] { step(s); }), ErrorCode::IterationBreakdown);
}

TEST(Step, LargeEFIsRebalanced) {
  DoublingState s;
  s.e = scalar(1e-3);
  s.f = scalar(1e3);
  s.g = scalar(0.1);
  s.h = scalar(0.1);
  s.tau_sign = 1e-12;
  const DoublingState next = step(s);
  const double factor = 1.0 / (1.0 - 0.01);
  // product E·F is what G and H see; the pair is stored with equal norms
  EXPECT_NEAR(next.e(0, 0) * next.f(0, 0), (1e-3 * factor * 1e-3) * (1e3 * factor * 1e3), 1e-12);
  EXPECT_NEAR(next.e(0, 0), next.f(0, 0), 1e-12);
  EXPECT_NEAR(next.h(0, 0), 0.1 + 1e3 * factor * 0.1 * 1e-3, 1e-15);
}

TEST(Solve, ScalarNonsingular) {
  const MareProblem p = scalar_problem(2, 1, 1, 1);
  const SolveReport r = solve(p, select_parameters(p));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.phi(0, 0), kGolden, 1e-12);
  EXPECT_NEAR(r.psi(0, 0), kGolden, 1e-12);
  EXPECT_LE(r.iterations, 8);
  ASSERT_TRUE(r.theoretical_rate.has_value());
  EXPECT_NEAR(*r.theoretical_rate, 0.0212862, 1e-6);
  // R = (√5−1)/2, S = (√5+1)/2 with (α, β) = (2, 1)
  const double rr = (std::sqrt(5.0) - 1.0) / 2.0, ss = (std::sqrt(5.0) + 1.0) / 2.0;
  EXPECT_NEAR(*r.theoretical_rate, std::abs((rr - 1.0) / (rr + 2.0)) * std::abs((ss - 2.0) / (ss + 1.0)), 1e-14);
  ASSERT_TRUE(r.observed_rate.has_value());
  EXPECT_LE(*r.observed_rate, *r.theoretical_rate + 0.05);
  EXPECT_FALSE(r.non_quadratic);
  EXPECT_EQ(r.diagnostic_violations(), 0);
  EXPECT_TRUE(r.certificate.all_passed());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Solve, ReducibleSingular) {
  const MareProblem p = reducible_problem();
  const SolveReport r = solve(p, select_parameters(p));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(norm1(r.phi), 1e-12);
  EXPECT_NEAR(r.psi(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(r.psi(0, 1), 0.5, 1e-12);
  EXPECT_EQ(*r.theoretical_rate, 0.0);
  EXPECT_TRUE(r.certificate.all_passed());
  EXPECT_TRUE(r.certificate.s_singular);
  EXPECT_FALSE(r.certificate.r_singular);
  EXPECT_EQ(r.diagnostic_violations(), 0);
}

TEST(Solve, CriticalIsBestEffort) {
  const MareProblem p = scalar_problem(1, 1, 1, 1);
  const SolveReport r = solve(p, select_parameters(p));
  EXPECT_TRUE(r.non_quadratic);
  EXPECT_FALSE(r.warnings.empty());
  ASSERT_GE(r.h_history.size(), 3u);
  EXPECT_NEAR(r.h_history[0](0, 0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(r.h_history[1](0, 0), 4.0 / 5.0, 1e-14);
  EXPECT_NEAR(r.h_history[2](0, 0), 8.0 / 9.0, 1e-14);
  EXPECT_GT(r.phi(0, 0), 0.999);
  EXPECT_LE(r.phi(0, 0), 1.0 + 1e-12);
  // errors roughly halve per step
  for (std::size_t k = 1; k + 1 < 10; ++k) {
    const double ratio = (1.0 - r.h_history[k + 1](0, 0)) / (1.0 - r.h_history[k](0, 0));
    EXPECT_NEAR(ratio, 0.5, 0.06);
  }
  ASSERT_TRUE(r.observed_rate.has_value());
  EXPECT_GT(*r.observed_rate, 0.99);
}

TEST(Solve, MaxIterationsReported) {
  const MareProblem p = scalar_problem(1, 1, 1, 1);
  DoublingParams params = select_parameters(p);
  params.max_iter = 3;
  const SolveReport r = solve(p, params);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_NEAR(r.phi(0, 0), 16.0 / 17.0, 1e-14);
}

TEST(ObservedRate, InsufficientTrace) {
  const Matrix phi = scalar(0.5);
  EXPECT_EQ(code_of([&] { observed_rate({phi, phi, phi}, phi); }), ErrorCode::InsufficientTrace);
  EXPECT_EQ(code_of([&] { observed_rate({scalar(0.25), phi}, phi); }), ErrorCode::InsufficientTrace);
}

TEST(ObservedRate, LastThreeUsable) {
  const Matrix limit = scalar(0.0);
  // errors r^(2^k) with r = 0.5 give exactly 0.5 at each k
  std::vector<Matrix> h;
  for (int k = 0; k < 5; ++k) h.push_back(scalar(std::pow(0.5, std::ldexp(1.0, k))));
  EXPECT_NEAR(observed_rate(h, limit), 0.5, 1e-14);
  h[1] = scalar(0.9 * 0.9);  // outside the last three, ignored
  EXPECT_NEAR(observed_rate(h, limit), 0.5, 1e-14);
  h[4] = scalar(std::pow(0.6, 16.0));
  EXPECT_NEAR(observed_rate(h, limit), 0.6, 1e-14);
}

TEST(TheoreticalRate, EqualParametersGiveSdaRate) {
  const MareProblem p = scalar_problem(2, 1, 1, 1);
  const Certificate cert = make_certificate(p, scalar(kGolden), scalar(kGolden));
  const double r = (std::sqrt(5.0) - 1.0) / 2.0, s = (std::sqrt(5.0) + 1.0) / 2.0, g = 2.0;
  DoublingParams params;
  params.alpha = params.beta = g;
  EXPECT_NEAR(theoretical_rate(p, cert, params), std::abs((r - g) / (r + g)) * std::abs((s - g) / (s + g)), 1e-15);
}

TEST(TraceCsv, HeaderAndRows) {
  const MareProblem p = scalar_problem(2, 1, 1, 1);
  const SolveReport r = solve(p, select_parameters(p));
  std::ostringstream out;
  write_trace_csv(out, r.trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,dH,dG,minpivot_IGH,minpivot_IHG,sign_violations_E,sign_violations_F,monotonicity_violations");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.iterations + 1);
}

TEST(SolveProperty, SdaAndAddaAreBitwiseIdenticalWhenParametersMatch) {
  for (int i = 0; i < 20; ++i) {
    const MareProblem p = suite_problem(i, i % 2 ? Regime::NonsingularK : Regime::SingularNoncritical);
    const DoublingParams sda = select_parameters(p, std::nullopt, DoublingMode::SDA);
    const DoublingParams adda = select_parameters(p, std::make_pair(sda.alpha, sda.beta));
    const SolveReport a = solve(p, sda);
    const SolveReport b = solve(p, adda);
    ASSERT_EQ(a.h_history.size(), b.h_history.size());
    for (std::size_t k = 0; k < a.h_history.size(); ++k) {
      EXPECT_EQ(a.h_history[k], b.h_history[k]);
      EXPECT_EQ(a.g_history[k], b.g_history[k]);
    }
  }
}

TEST(SolveProperty, DualSolutionIsPrimalPsi) {
  for (int i = 0; i < 20; ++i) {
    const MareProblem p = suite_problem(i, i % 2 ? Regime::NonsingularK : Regime::SingularNoncritical);
    const SolveReport primal = solve(p, select_parameters(p));
    const MareProblem d = p.dual();
    const SolveReport dual = solve(d, select_parameters(d));
    EXPECT_LE(norm1(dual.phi - primal.psi), 1e-10 * std::max(1.0, norm1(primal.psi)));
    EXPECT_LE(norm1(dual.psi - primal.phi), 1e-10 * std::max(1.0, norm1(primal.phi)));
  }
}

TEST(SolveProperty, DoublingInvariantsOnGeneratedProblems) {
  for (int i = 0; i < 40; ++i) {
    const MareProblem p = suite_problem(i, i % 2 ? Regime::NonsingularK : Regime::SingularNoncritical);
    const SolveReport r = solve(p, select_parameters(p));
    EXPECT_TRUE(r.converged) << i;
    EXPECT_EQ(r.diagnostic_violations(), 0) << i;
    EXPECT_TRUE(r.certificate.all_passed()) << i;
    ASSERT_TRUE(r.theoretical_rate.has_value());
    EXPECT_LT(*r.theoretical_rate, 1.0);
    EXPECT_FALSE(r.non_quadratic) << i;
  }
}

TEST(SolveProperty, OptimalParametersMinimizeRate) {
  SplitMix64 rng(41);
  for (int i = 0; i < 10; ++i) {
    const MareProblem p = suite_problem(i, i % 2 ? Regime::NonsingularK : Regime::SingularNoncritical);
    const DoublingParams best = select_parameters(p);
    const SolveReport r = solve(p, best);
    const double optimal = theoretical_rate(p, r.certificate, best);
    for (int j = 0; j < 5; ++j) {
      DoublingParams other = best;
      other.alpha = best.alpha * rng.uniform(1.0, 3.0);
      other.beta = best.beta * rng.uniform(1.0, 3.0);
      EXPECT_LE(optimal, theoretical_rate(p, r.certificate, other) + 1e-12);
    }
  }
}

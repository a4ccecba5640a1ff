#include "mare/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "CLI11.hpp"
#include "mare/adda.hpp"
#include "mare/error.hpp"
#include "mare/json_io.hpp"
#include "mare/oracle.hpp"
#include "mare/probgen.hpp"

namespace mare::cli {

namespace {

using io::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NonFinite:
    case ErrorCode::NotZMatrix:
    case ErrorCode::InvalidParameters:
    case ErrorCode::NonpositiveDiagonal:
      return kUsage;
    default:
      return kBreakdown;
  }
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

/// Every report carries the same keys; fields a command does not produce stay null.
json empty_report(const std::string& command) {
  json r = json::object();
  r["command"] = command;
  for (const char* key : {"regime", "drift", "r", "alpha", "beta", "iterations", "residual_primal", "residual_dual",
                          "rho_phi_psi", "theoretical_rate", "observed_rate", "phi", "psi", "error"}) {
    r[key] = nullptr;
  }
  r["checks"] = json::array();
  r["warnings"] = json::array();
  r["details"] = json::object();
  return r;
}

json check_json(const Check& c) {
  json j = json::object();
  j["id"] = c.id;
  j["name"] = c.name;
  j["applicable"] = c.applicable;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  j["detail"] = c.detail;
  return j;
}

void add_check(json& report, int id, const std::string& name, bool passed, double value, double threshold,
               const std::string& detail = {}) {
  Check c;
  c.id = id;
  c.name = name;
  c.passed = passed;
  c.value = value;
  c.threshold = threshold;
  c.detail = detail;
  report["checks"].push_back(check_json(c));
}

bool all_checks_pass(const json& report) {
  const json& checks = report["checks"];
  return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["passed"].get<bool>(); });
}

void fill_class(json& report, const ProblemClass& cls) {
  report["regime"] = std::string(to_string(cls.regime));
  report["r"] = cls.assumption1.algebraic_multiplicity;
  report["drift"] = cls.nulls ? json(cls.nulls->drift) : json(nullptr);
  json& d = report["details"];
  d["k_kind"] = std::string(to_string(cls.k_class.kind));
  d["k_gap"] = cls.k_class.gap;
  d["regular"] = cls.regular.regular;
  d["irreducible"] = cls.irreducible;
  d["geometric_multiplicity"] = cls.assumption1.geometric_multiplicity;
  d["rank_margin_low"] = cls.assumption1.margin_low;
  if (cls.assumption1.margin_low) report["warnings"].push_back("rank decision margin below 1e3 * tau_rank");
}

void fill_certificate(json& report, const Certificate& cert) {
  report["residual_primal"] = cert.residual_primal;
  report["residual_dual"] = cert.residual_dual;
  report["rho_phi_psi"] = cert.rho_phi_psi;
  report["phi"] = io::matrix_to_json(cert.phi);
  report["psi"] = io::matrix_to_json(cert.psi);
  for (const auto& c : cert.checks) report["checks"].push_back(check_json(c));
  json& d = report["details"];
  d["similarity_residual"] = cert.similarity_residual;
  d["r_kind"] = std::string(to_string(cert.r_kind));
  d["s_kind"] = std::string(to_string(cert.s_kind));
  d["r_singular"] = cert.r_singular;
  d["s_singular"] = cert.s_singular;
  d["i_minus_phi_psi"] = std::string(to_string(cert.i_phi_psi_kind));
  d["i_minus_psi_phi"] = std::string(to_string(cert.i_psi_phi_kind));
}

bool guaranteed(Regime r) { return r == Regime::NonsingularK || r == Regime::SingularNoncritical; }

struct SolveOptions {
  std::string method = "adda";
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::string trace;
};

json run_classify(const std::string& path) {
  const MareProblem p = io::load_problem(path);
  json report = empty_report("classify");
  fill_class(report, classify_problem(p));
  return report;
}

json run_solve(const std::string& path, const SolveOptions& opt, CommandOutcome& outcome) {
  const MareProblem p = io::load_problem(path);
  json report = empty_report("solve");
  report["details"]["method"] = opt.method;

  if (opt.method == "fixed-point") {
    if (!opt.trace.empty()) throw Error(ErrorCode::InvalidInput, "--trace applies to doubling methods only");
    const double tol = opt.tol.value_or(kOracleTolerance);
    const int max_iter = opt.max_iter.value_or(100000);
    const ProblemClass cls = classify_problem(p);
    fill_class(report, cls);
    const OracleReport primal = fixed_point_solve(p, tol, max_iter);
    const OracleReport dual = fixed_point_solve(p.dual(), tol, max_iter);
    report["iterations"] = std::max(primal.iterations, dual.iterations);
    add_check(report, 6, "converged", primal.converged && dual.converged,
              std::max(primal.final_residual, dual.final_residual), tol);
    fill_certificate(report, make_certificate(p, primal.phi, dual.phi, cls));
    return report;
  }

  if (opt.method != "adda" && opt.method != "sda") {
    throw Error(ErrorCode::InvalidInput, "--method must be adda, sda or fixed-point");
  }
  if (opt.alpha.has_value() != opt.beta.has_value()) {
    throw Error(ErrorCode::InvalidInput, "--alpha and --beta must be given together");
  }
  const DoublingMode mode = opt.method == "sda" ? DoublingMode::SDA : DoublingMode::ADDA;
  std::optional<std::pair<double, double>> requested;
  if (opt.alpha) requested = std::make_pair(*opt.alpha, *opt.beta);
  DoublingParams params = select_parameters(p, requested, mode);
  if (opt.tol) params.stop_tol = *opt.tol;
  if (opt.max_iter) params.max_iter = *opt.max_iter;

  const SolveReport sr = solve(p, params);
  fill_class(report, sr.problem_class);
  report["alpha"] = params.alpha;
  report["beta"] = params.beta;
  report["iterations"] = sr.iterations;
  report["theoretical_rate"] = optional_number(sr.theoretical_rate);
  report["observed_rate"] = optional_number(sr.observed_rate);
  report["details"]["non_quadratic"] = sr.non_quadratic;
  report["details"]["diagnostic_violations"] = sr.diagnostic_violations();
  for (const auto& w : sr.warnings) report["warnings"].push_back(w);
  fill_certificate(report, sr.certificate);
  add_check(report, 6, "converged", sr.converged, sr.iterations, params.max_iter);
  if (guaranteed(sr.problem_class.regime)) {
    add_check(report, 7, "doubling_diagnostics", sr.diagnostic_violations() == 0, sr.diagnostic_violations(), 0.0);
  }

  if (!opt.trace.empty()) {
    std::ofstream out(opt.trace);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + opt.trace);
    write_trace_csv(out, sr.trace);
    outcome.trace_csv = opt.trace;
  }
  return report;
}

json run_verify(const std::string& path, const std::string& phi_path, const std::string& psi_path, double tol) {
  const MareProblem p = io::load_problem(path);
  const Matrix phi = io::load_matrix(phi_path);
  const Matrix psi = io::load_matrix(psi_path);
  json report = empty_report("verify");
  const ProblemClass cls = classify_problem(p);
  fill_class(report, cls);
  fill_certificate(report, make_certificate(p, phi, psi, cls, tol));
  return report;
}

json run_oracle(const std::string& path, double tol, int max_iter) {
  const MareProblem p = io::load_problem(path);
  json report = empty_report("oracle");
  fill_class(report, classify_problem(p));
  const OracleReport o = fixed_point_solve(p, tol, max_iter);
  report["iterations"] = o.iterations;
  report["residual_primal"] = o.final_residual;
  report["phi"] = io::matrix_to_json(o.phi);
  add_check(report, 6, "converged", o.converged, o.final_residual, tol);
  add_check(report, 8, "monotone", o.monotonicity_violations == 0, o.monotonicity_violations, 0.0);
  return report;
}

json run_generate(const std::string& regime, int n, int m, std::uint64_t seed, double density, const std::string& out) {
  FamilySpec spec;
  spec.regime_target = parse_regime(regime);
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  spec.density = density;
  const MareProblem p = generate(spec);
  io::save_problem(p, out);
  json report = empty_report("generate");
  fill_class(report, classify_problem(p));
  report["details"]["output"] = out;
  report["details"]["name"] = p.name();
  return report;
}

json run_rate_study(const std::string& path, int grid) {
  if (grid < 1) throw Error(ErrorCode::InvalidInput, "--grid must be at least 1");
  const MareProblem p = io::load_problem(path);
  const DoublingParams best = select_parameters(p);
  const SolveReport sr = solve(p, best);
  json report = empty_report("rate-study");
  fill_class(report, sr.problem_class);
  report["alpha"] = best.alpha;
  report["beta"] = best.beta;
  report["iterations"] = sr.iterations;
  report["theoretical_rate"] = optional_number(sr.theoretical_rate);
  report["observed_rate"] = optional_number(sr.observed_rate);
  report["residual_primal"] = sr.certificate.residual_primal;
  report["residual_dual"] = sr.certificate.residual_dual;
  report["rho_phi_psi"] = sr.certificate.rho_phi_psi;
  for (const auto& w : sr.warnings) report["warnings"].push_back(w);

  struct Point {
    double alpha, beta, rate;
    int iterations;
  };
  // Grid α = α*(1 + i/G), β = β*(1 + j/G) for i, j = 0..G; each point is independent.
  std::vector<std::future<Point>> jobs;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      const double alpha = best.alpha * (1.0 + static_cast<double>(i) / grid);
      const double beta = best.beta * (1.0 + static_cast<double>(j) / grid);
      jobs.push_back(std::async(std::launch::async, [&p, &sr, alpha, beta] {
        DoublingParams params = select_parameters(p, std::make_pair(alpha, beta));
        Point pt{alpha, beta, theoretical_rate(p, sr.certificate, params), -1};
        try {
          pt.iterations = solve(p, params).iterations;
        } catch (const Error&) {
        }
        return pt;
      }));
    }
  }
  json table = json::array();
  double best_rate = std::numeric_limits<double>::quiet_NaN();
  double min_other = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
    const Point pt = jobs[idx].get();
    json row = json::object();
    row["alpha"] = pt.alpha;
    row["beta"] = pt.beta;
    row["theoretical_rate"] = pt.rate;
    row["iterations"] = pt.iterations >= 0 ? json(pt.iterations) : json(nullptr);
    table.push_back(std::move(row));
    if (idx == 0) {
      best_rate = pt.rate;
    } else {
      min_other = std::min(min_other, pt.rate);
    }
  }
  report["details"]["grid"] = std::move(table);
  add_check(report, 9, "optimal_parameters_minimize_rate", !(best_rate > min_other + 1e-12), best_rate,
            min_other + 1e-12);
  return report;
}

}  // namespace

CommandOutcome execute(const std::vector<std::string>& args) {
  CommandOutcome outcome;
  CLI::App app{"Solver and verifier for M-matrix algebraic Riccati equations", "mare_cli"};
  app.require_subcommand(1);

  std::string problem;
  SolveOptions solve_opt;
  std::string phi_path;
  std::string psi_path;
  double verify_tol = kCertificateTolerance;
  double oracle_tol = kOracleTolerance;
  int oracle_max_iter = 100000;
  std::string regime;
  int gen_n = 0;
  int gen_m = 0;
  std::uint64_t seed = 0;
  double density = 0.5;
  std::string out_path;
  int grid = 4;

  auto* classify = app.add_subcommand("classify", "Classify K and report the regime");
  classify->add_option("problem", problem, "Problem JSON")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Compute the minimal nonnegative solutions");
  solve_cmd->add_option("problem", problem, "Problem JSON")->required();
  solve_cmd->add_option("--method", solve_opt.method, "adda | sda | fixed-point");
  solve_cmd->add_option("--alpha", solve_opt.alpha, "Doubling parameter alpha");
  solve_cmd->add_option("--beta", solve_opt.beta, "Doubling parameter beta");
  solve_cmd->add_option("--tol", solve_opt.tol, "Stopping tolerance");
  solve_cmd->add_option("--max-iter", solve_opt.max_iter, "Iteration cap");
  solve_cmd->add_option("--trace", solve_opt.trace, "Write the iteration trace as CSV");

  auto* verify = app.add_subcommand("verify", "Certify candidate solutions");
  verify->add_option("problem", problem, "Problem JSON")->required();
  verify->add_option("--phi", phi_path, "Matrix JSON for Phi")->required();
  verify->add_option("--psi", psi_path, "Matrix JSON for Psi")->required();
  verify->add_option("--tol", verify_tol, "Check tolerance");

  auto* oracle = app.add_subcommand("oracle", "Monotone fixed-point reference solve");
  oracle->add_option("problem", problem, "Problem JSON")->required();
  oracle->add_option("--tol", oracle_tol, "Residual tolerance");
  oracle->add_option("--max-iter", oracle_max_iter, "Iteration cap");

  auto* gen = app.add_subcommand("generate", "Generate a problem of a given regime");
  gen->add_option("--regime", regime, "nonsingular | singular-noncritical | critical")->required();
  gen->add_option("--n", gen_n, "Order of D")->required();
  gen->add_option("--m", gen_m, "Order of A")->required();
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("--density", density, "Fraction of nonzero off-diagonals");
  gen->add_option("-o", out_path, "Output problem JSON")->required();

  auto* rate = app.add_subcommand("rate-study", "Compare convergence rates over an (alpha, beta) grid");
  rate->add_option("problem", problem, "Problem JSON")->required();
  rate->add_option("--grid", grid, "Steps per axis from the optimal value up to twice it");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    outcome.message = app.help();
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.exit_code = kUsage;
    outcome.message = std::string("usage error: ") + e.what() + "\n" + app.help();
    return outcome;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json report;
  try {
    if (command == "classify") {
      report = run_classify(problem);
    } else if (command == "solve") {
      report = run_solve(problem, solve_opt, outcome);
    } else if (command == "verify") {
      report = run_verify(problem, phi_path, psi_path, verify_tol);
    } else if (command == "oracle") {
      report = run_oracle(problem, oracle_tol, oracle_max_iter);
    } else if (command == "generate") {
      report = run_generate(regime, gen_n, gen_m, seed, density, out_path);
    } else {
      report = run_rate_study(problem, grid);
    }
  } catch (const Error& e) {
    outcome.exit_code = exit_code_for(e.code());
    report = empty_report(command);
    report["error"] = e.what();
    outcome.report_json = io::dump(report);
    outcome.message = command + ": " + e.what();
    return outcome;
  }
  outcome.exit_code = all_checks_pass(report) ? kOk : kCheckFailed;
  outcome.report_json = io::dump(report);
  return outcome;
}

}  // namespace mare::cli

// Command-line workbench for affine fixed-point iteration: run solvers on
// problem files, evaluate the closed-form rate characterization, sweep the
// eigenvalue plane, and cross-check simulation against the formulas.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raa/convergence.hpp"
#include "raa/linalg.hpp"
#include "raa/problem_io.hpp"
#include "raa/propagator.hpp"
#include "raa/random.hpp"
#include "raa/solvers.hpp"
#include "raa/sweep.hpp"
#include "raa/system.hpp"

namespace {

std::string fmt(double v) { return raa::detail::format_double(v); }

struct MethodSpec {
  raa::Method kind = raa::Method::kPicard;
  std::size_t window = 0;
};

MethodSpec parse_method(const std::string& text) {
  if (text == "picard") return {raa::Method::kPicard, 0};
  if (text == "aa1-restarted") return {raa::Method::kRestartedAA1, 0};
  const std::string prefix = "aa-windowed:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string suffix = text.substr(prefix.size());
    char* end = nullptr;
    const long w = std::strtol(suffix.c_str(), &end, 10);
    if (!suffix.empty() && end == suffix.c_str() + suffix.size() && w >= 0 && w <= 1000)
      return {raa::Method::kWindowedAA, static_cast<std::size_t>(w)};
  }
  throw std::invalid_argument(
      "unknown method '" + text +
      "' (expected picard, aa1-restarted, or aa-windowed:<m>)");
}

struct SolveOptions {
  std::string problem_path;
  std::string method = "picard";
  std::size_t max_iters = 100;
  double tolerance = 1e-10;
  double divergence_cap = 1e8;
  std::string trace_out;
};

int cmd_solve(const SolveOptions& opt) {
  const raa::ProblemSpec spec = raa::load_problem(opt.problem_path);
  for (const std::string& w : spec.warnings) std::cerr << "warning: " << w << "\n";

  const raa::SymmetricSystem sys(spec.M, spec.b);
  const MethodSpec method = parse_method(opt.method);
  const raa::SolverConfig cfg{opt.max_iters, opt.tolerance, opt.divergence_cap};

  raa::IterationTrace trace;
  switch (method.kind) {
    case raa::Method::kPicard:
      trace = raa::run_picard(sys, spec.x0, cfg);
      break;
    case raa::Method::kRestartedAA1:
      trace = raa::run_restarted_aa1(sys, spec.x0, cfg);
      break;
    case raa::Method::kWindowedAA:
      trace = raa::run_windowed_aa(sys, spec.x0, method.window, cfg);
      break;
  }
  if (!opt.trace_out.empty()) raa::write_trace_csv(trace, opt.trace_out);

  const raa::ConvergenceReport rep = raa::make_report(sys, trace, method.kind);
  std::cout << "problem: " << opt.problem_path << "\n"
            << "dimension: " << sys.dim() << "\n"
            << "method: " << opt.method << "\n"
            << "termination: " << raa::to_string(trace.termination) << "\n"
            << "steps: " << rep.last_step << "\n"
            << "final residual norm: " << fmt(trace.residual_norms.back()) << "\n"
            << "rate empirical: " << fmt(rep.rho_empirical) << "\n";
  if (rep.rho_closed_form) {
    std::cout << "rate closed form: " << fmt(*rep.rho_closed_form) << "\n"
              << "rate discrepancy: " << fmt(rep.discrepancy) << "\n";
  }

  const bool solved = trace.termination == raa::Termination::kToleranceReached ||
                      trace.termination == raa::Termination::kExactSolution;
  return solved ? 0 : 1;
}

struct AnalyzeOptions {
  double m1 = 0.0;
  double m2 = 0.0;
  double eps = 0.0;
  bool has_eps = false;
};

int cmd_analyze(const AnalyzeOptions& opt) {
  const raa::Comparison cmp = raa::compare_aa_vs_picard(opt.m1, opt.m2);
  const raa::WorstCase wc = raa::worst_case_2x2(opt.m1, opt.m2);

  std::cout << "eigenvalues: " << fmt(opt.m1) << " " << fmt(opt.m2) << "\n"
            << "rate picard worst: " << fmt(wc.rho_picard) << "\n"
            << "rate aa worst: " << fmt(wc.rho_aa) << "\n"
            << "worst mix ratio: " << fmt(wc.eps_worst.first) << " and "
            << fmt(wc.eps_worst.second) << "\n"
            << "verdict: " << raa::to_string(cmp.verdict) << "\n"
            << "contractive nonzero spectrum: " << (cmp.contractive_nonzero ? "yes" : "no")
            << "\n";
  if (opt.has_eps) {
    const double rho = raa::rho_closed_form_2x2(opt.m1, opt.m2, opt.eps);
    const double factor =
        rho == 0.0 ? 0.0 : raa::lambda_of_eps(opt.m1, opt.m2, opt.eps);
    std::cout << "mix ratio: " << fmt(opt.eps) << "\n"
              << "four-step factor: " << fmt(factor) << "\n"
              << "rate at ratio: " << fmt(rho) << "\n";
  }
  return 0;
}

struct SweepOptions {
  std::string range = "-1:1";
  std::size_t resolution = 401;
  double band = 1e-8;
  std::string out;
};

int cmd_sweep(const SweepOptions& opt) {
  raa::SweepConfig cfg;
  const std::size_t colon = opt.range.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("range must look like lo:hi, got '" + opt.range + "'");
  try {
    cfg.lo = std::stod(opt.range.substr(0, colon));
    cfg.hi = std::stod(opt.range.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("range must look like lo:hi, got '" + opt.range + "'");
  }
  cfg.resolution = opt.resolution;
  cfg.exclusion_band = opt.band;

  const raa::SweepResult result = raa::run_sweep(cfg);
  raa::emit_csv(result, opt.out);

  std::size_t valid = 0, masked = 0;
  for (const raa::SweepCell& c : result.cells) {
    valid += c.valid;
    masked += c.masked;
  }
  std::cout << "sweep: range [" << fmt(cfg.lo) << ", " << fmt(cfg.hi) << "] resolution "
            << cfg.resolution << "\n"
            << "cells: " << result.cells.size() << " (valid " << valid << ", masked "
            << masked << ")\n"
            << "wrote: " << opt.out << "\n";
  return 0;
}

// One property suite of the verify subcommand.
struct SuiteResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t total = 0;
  double worst = 0.0;  // largest observed discrepancy, when meaningful

  void tally(bool ok, double observed = 0.0) {
    ++total;
    passed += ok;
    worst = std::max(worst, observed);
  }
};

void print_suite(const SuiteResult& s) {
  std::cout << (s.passed == s.total ? "[PASS] " : "[FAIL] ") << s.name << ": "
            << s.passed << "/" << s.total << " checks (worst discrepancy "
            << fmt(s.worst) << ")\n";
}

double signed_log_uniform(raa::SplitMix64& rng, double lo, double hi) {
  const double mag = rng.log_uniform(lo, hi);
  return rng.below(2) == 0 ? mag : -mag;
}

struct PlaneDraw {
  double m1 = 0.0, m2 = 0.0, theta = 0.0;
};

PlaneDraw draw_plane(raa::SplitMix64& rng) {
  PlaneDraw d;
  d.m1 = rng.uniform_signed(0.05, 0.95);
  d.m2 = rng.uniform_signed(0.05, 0.95);
  while (std::abs(d.m2 - d.m1) < 0.05) d.m2 = rng.uniform_signed(0.05, 0.95);
  d.theta = rng.uniform(0.0, 3.141592653589793);
  return d;
}

SuiteResult suite_eigenvector_annihilation(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"eigenvector-annihilation"};
  for (std::size_t t = 0; t < samples; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(5));
    std::vector<double> eigs(n);
    for (double& e : eigs) e = rng.uniform_signed(0.05, 0.95);
    const auto basis = raa::random_orthonormal_basis(rng, n);
    const raa::SymmetricSystem sys(raa::symmetric_from_spectrum(basis, eigs),
                                   raa::gaussian_vector(rng, n));
    for (std::size_t i = 0; i < n; ++i)
      for (double c : {1.0, -1e-6, 1e6}) {
        const double err =
            raa::norm(raa::apply_propagator(sys, raa::scaled(basis[i], c))) /
            std::abs(c);
        s.tally(err <= 1e-12, err);
      }
  }
  return s;
}

SuiteResult suite_two_step_closed_form(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"two-step-closed-form"};
  for (std::size_t t = 0; t < samples; ++t) {
    const PlaneDraw d = draw_plane(rng);
    const auto basis = raa::rotation_basis_2d(d.theta);
    const raa::SymmetricSystem sys(raa::symmetric_2x2(d.m1, d.m2, d.theta), {1.0, -0.5});
    const auto pair = raa::make_eigen_pair_selection(d.m1, basis[0], d.m2, basis[1]);

    const double c1 = rng.uniform_signed(0.1, 10.0);
    const double eps = signed_log_uniform(rng, 0.1, 10.0);
    const raa::Vector z =
        raa::add(raa::scaled(basis[0], c1), raa::scaled(basis[1], c1 * eps));
    const double err = raa::norm(raa::sub(raa::apply_propagator(sys, z),
                                          raa::two_step_image_closed_form(pair, c1, eps))) /
                       raa::norm(z);
    s.tally(err <= 1e-12, err);
  }
  return s;
}

SuiteResult suite_four_step_scaling(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"four-step-scaling"};
  for (std::size_t t = 0; t < samples; ++t) {
    const PlaneDraw d = draw_plane(rng);
    const auto basis = raa::rotation_basis_2d(d.theta);
    const raa::SymmetricSystem sys(raa::symmetric_2x2(d.m1, d.m2, d.theta), {1.0, -0.5});

    const double c1 = rng.uniform_signed(0.1, 10.0);
    const double eps = signed_log_uniform(rng, 0.1, 10.0);
    const raa::Vector z =
        raa::add(raa::scaled(basis[0], c1), raa::scaled(basis[1], c1 * eps));

    const raa::FourStepCheck check = raa::verify_four_periodicity(sys, z);
    const double lambda = raa::lambda_of_eps(d.m1, d.m2, eps);
    const double gap = std::abs(check.lambda_estimate - lambda) / std::max(1.0, lambda);
    const bool ok = !check.degenerate && check.discrepancy <= 1e-10 && gap <= 1e-10;
    s.tally(ok, std::max(check.discrepancy, gap));
  }
  return s;
}

SuiteResult suite_extremal_ratio_oracle(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"extremal-ratio-oracle"};
  for (std::size_t t = 0; t < samples; ++t) {
    const PlaneDraw d = draw_plane(rng);
    const double estar = raa::eps_extremal(d.m1, d.m2).first;
    const double lstar = raa::lambda_of_eps(d.m1, d.m2, estar);

    double grid_excess = 0.0;
    for (int g = 0; g <= 1000; ++g) {
      const double eps = std::pow(10.0, -3.0 + 6.0 * g / 1000.0);
      grid_excess = std::max(grid_excess, raa::lambda_of_eps(d.m1, d.m2, eps) - lstar);
    }
    s.tally(grid_excess <= 1e-12, grid_excess);

    const double gap = std::abs(raa::lambda_extremal(d.m1, d.m2) - lstar);
    s.tally(gap <= 1e-12, gap);
  }
  return s;
}

SuiteResult suite_simulation_vs_closed_form(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"simulation-vs-closed-form"};
  std::size_t accepted = 0;
  while (accepted < samples) {
    const PlaneDraw d = draw_plane(rng);
    const double eps = signed_log_uniform(rng, 0.1, 10.0);
    const double closed = raa::rho_closed_form_2x2(d.m1, d.m2, eps);
    if (closed < 0.3 || closed > 0.95) continue;
    ++accepted;

    const auto basis = raa::rotation_basis_2d(d.theta);
    const raa::SymmetricSystem sys(raa::symmetric_2x2(d.m1, d.m2, d.theta), {1.0, -0.5});
    const raa::Vector z =
        raa::add(basis[0], raa::scaled(basis[1], eps));
    const raa::Vector x0 = raa::iterate_for_residual(sys, z);
    const raa::IterationTrace tr = raa::run_restarted_aa1(sys, x0, {200, 0.0, 1e12});
    const double est = raa::estimate_rho(tr);
    const double gap = std::abs(est - closed);
    s.tally(gap <= 1e-3, gap);
  }
  return s;
}

SuiteResult suite_divergence_rescue(raa::SplitMix64 rng, std::size_t samples) {
  SuiteResult s{"divergence-rescue"};
  std::vector<std::pair<double, double>> pairs{{2.0, 0.5}};
  while (pairs.size() < 1 + std::max<std::size_t>(1, samples / 10)) {
    const double m1 = (rng.below(2) == 0 ? 1.0 : -1.0) * rng.uniform(1.05, 2.2);
    const double m2 = rng.uniform_signed(0.05, 0.95);
    if (raa::rho_aa_worst(m1, m2) > 0.9) continue;
    pairs.emplace_back(m1, m2);
  }
  for (const auto& [m1, m2] : pairs) {
    const double theta = rng.uniform(0.0, 3.141592653589793);
    const auto basis = raa::rotation_basis_2d(theta);
    const raa::SymmetricSystem sys(raa::symmetric_2x2(m1, m2, theta), {1.0, -0.5});
    const raa::WorstCase wc = raa::worst_case_2x2(m1, m2);
    const raa::Vector z = raa::add(raa::scaled(basis[0], wc.r0_direction[0]),
                                   raa::scaled(basis[1], wc.r0_direction[1]));
    const raa::Vector x0 = raa::iterate_for_residual(sys, z);

    const raa::IterationTrace pi = raa::run_picard(sys, x0, {2000, 1e-10, 1e8});
    s.tally(pi.termination == raa::Termination::kDiverged);

    const raa::IterationTrace aa = raa::run_restarted_aa1(sys, x0, {400, 1e-10, 1e8});
    s.tally(aa.termination == raa::Termination::kToleranceReached ||
            aa.termination == raa::Termination::kExactSolution);
  }
  return s;
}

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 100;
};

int cmd_verify(const VerifyOptions& opt) {
  std::cout << "seed: " << opt.seed << "\n"
            << "samples: " << opt.samples << "\n";
  raa::SplitMix64 master(opt.seed);

  std::vector<SuiteResult> results;
  results.push_back(
      suite_eigenvector_annihilation(raa::SplitMix64(master.split()), opt.samples));
  results.push_back(
      suite_two_step_closed_form(raa::SplitMix64(master.split()), opt.samples));
  results.push_back(
      suite_four_step_scaling(raa::SplitMix64(master.split()), opt.samples));
  results.push_back(
      suite_extremal_ratio_oracle(raa::SplitMix64(master.split()), opt.samples));
  results.push_back(
      suite_simulation_vs_closed_form(raa::SplitMix64(master.split()), opt.samples));
  results.push_back(
      suite_divergence_rescue(raa::SplitMix64(master.split()), opt.samples));

  std::size_t failed = 0;
  for (const SuiteResult& s : results) {
    print_suite(s);
    failed += s.passed != s.total;
  }
  if (failed == 0) {
    std::cout << "verify: all " << results.size() << " suites passed\n";
    return 0;
  }
  std::cout << "verify: " << failed << " of " << results.size() << " suites failed\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine fixed-point iteration workbench"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "run a solver on a problem file");
  solve->add_option("problem", solve_opt.problem_path, "problem file")->required();
  solve->add_option("--method", solve_opt.method,
                    "picard, aa1-restarted, or aa-windowed:<m>");
  solve->add_option("--max-iters", solve_opt.max_iters, "iteration cap");
  solve->add_option("--tol", solve_opt.tolerance, "absolute residual tolerance");
  solve->add_option("--divergence-cap", solve_opt.divergence_cap,
                    "stop when the residual grows by this factor");
  solve->add_option("--trace-out", solve_opt.trace_out, "write the iteration trace CSV");

  AnalyzeOptions an_opt;
  CLI::App* analyze =
      app.add_subcommand("analyze2x2", "closed-form rates for an eigenvalue pair");
  analyze->add_option("--m1", an_opt.m1, "first eigenvalue")->required();
  analyze->add_option("--m2", an_opt.m2, "second eigenvalue")->required();
  CLI::Option* eps_opt = analyze->add_option("--eps", an_opt.eps, "mix ratio");

  SweepOptions sw_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "rate map over the eigenvalue plane");
  sweep->add_option("--range", sw_opt.range, "axis range lo:hi (default -1:1)");
  sweep->add_option("--resolution", sw_opt.resolution, "grid points per axis");
  sweep->add_option("--band", sw_opt.band, "exclusion band around eigenvalue 1");
  sweep->add_option("--out", sw_opt.out, "output CSV path")->required();

  VerifyOptions vf_opt;
  CLI::App* verify =
      app.add_subcommand("verify", "cross-check simulation against the closed forms");
  verify->add_option("--seed", vf_opt.seed, "random seed");
  verify->add_option("--samples", vf_opt.samples, "draws per property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(solve_opt);
    if (*analyze) {
      an_opt.has_eps = eps_opt->count() > 0;
      return cmd_analyze(an_opt);
    }
    if (*sweep) return cmd_sweep(sw_opt);
    if (*verify) return cmd_verify(vf_opt);
  } catch (const raa::ProblemFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "raa/convergence.hpp"
#include "raa/linalg.hpp"
#include "raa/propagator.hpp"
#include "raa/random.hpp"
#include "raa/solvers.hpp"
#include "raa/system.hpp"
#include "support.hpp"

namespace {

struct Rotated2x2 {
  raa::SymmetricSystem sys;
  std::vector<raa::Vector> basis;
};

Rotated2x2 rotated(double m1, double m2, double theta) {
  return {raa::SymmetricSystem(raa::symmetric_2x2(m1, m2, theta), {1.0, -0.5}),
          raa::rotation_basis_2d(theta)};
}

raa::IterationTrace run_from_ratio(const Rotated2x2& inst, double c1, double eps,
                                   std::size_t iters) {
  const raa::Vector z =
      raa::add(raa::scaled(inst.basis[0], c1), raa::scaled(inst.basis[1], c1 * eps));
  const raa::Vector x0 = raa::iterate_for_residual(inst.sys, z);
  return raa::run_restarted_aa1(inst.sys, x0, {iters, 0.0, 1e12});
}

}  // namespace

TEST_CASE("estimate_rho recovers exact geometric decay", "[convergence]") {
  const raa::SymmetricSystem sys(raa::symmetric_2x2(0.5, -0.5, 0.0), {1.0, 1.0});
  const raa::IterationTrace tr = raa::run_picard(sys, {0.0, 0.0}, {60, 0.0, 1e12});
  CHECK(raa::estimate_rho(tr) == Catch::Approx(0.5).margin(1e-13));
}

TEST_CASE("estimate_rho on a restarted trace returns the fourth root of lambda",
          "[convergence]") {
  const Rotated2x2 inst = rotated(0.9, -0.9, 0.0);
  const raa::IterationTrace tr = run_from_ratio(inst, 1.0, 1.0, 60);
  const double lambda = raa::lambda_of_eps(0.9, -0.9, 1.0);
  CHECK(raa::estimate_rho(tr) == Catch::Approx(std::pow(lambda, 0.25)).margin(1e-11));
}

TEST_CASE("estimate_rho handles short and exact traces", "[convergence]") {
  const Rotated2x2 inst = rotated(0.8, 0.3, 0.4);

  // Eigendirection start: annihilated within one cycle, so the trace is
  // short and exact; the estimator reports a zero rate.
  const raa::IterationTrace fast = run_from_ratio(inst, 2.0, 0.0, 50);
  CHECK(fast.termination == raa::Termination::kExactSolution);
  CHECK(raa::estimate_rho(fast) == 0.0);

  // A short capped run has too few points to fit.
  const raa::IterationTrace capped = run_from_ratio(inst, 1.0, 1.0, 10);
  CHECK(capped.termination == raa::Termination::kMaxIters);
  CHECK_THROWS_AS(raa::estimate_rho(capped), std::invalid_argument);
}

TEST_CASE("closed-form rate matches long simulations", "[convergence]") {
  raa::SplitMix64 rng(2718);
  int accepted = 0;
  while (accepted < 40) {
    const double m1 = rng.uniform_signed(0.05, 0.95);
    const double m2 = rng.uniform_signed(0.05, 0.95);
    const double eps = rng.uniform_signed(0.1, 10.0);
    if (std::abs(m1 - m2) < 0.05) continue;
    const double closed = raa::rho_closed_form_2x2(m1, m2, eps);
    if (closed < 0.3 || closed > 0.95) continue;
    ++accepted;

    const Rotated2x2 inst = rotated(m1, m2, rng.uniform(0.0, 3.14159));
    const raa::IterationTrace tr = run_from_ratio(inst, 1.0, eps, 200);
    INFO("m1 " << m1 << " m2 " << m2 << " eps " << eps);
    CHECK(raa::estimate_rho(tr) == Catch::Approx(closed).margin(1e-8));
  }
}

TEST_CASE("rate special cases collapse to zero", "[convergence]") {
  CHECK(raa::rho_closed_form_2x2(0.5, -0.5, 0.0) == 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(raa::rho_closed_form_2x2(0.5, -0.5, inf) == 0.0);
  CHECK(raa::rho_closed_form_2x2(0.5, -0.5, -inf) == 0.0);
  CHECK(raa::rho_closed_form_2x2(0.4, 0.4, 1.0) == 0.0);
  CHECK(raa::rho_closed_form_2x2(0.0, 0.7, 1.0) == 0.0);
  CHECK(raa::rho_closed_form_2x2(0.7, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(raa::rho_closed_form_2x2(0.5, -0.5, std::nan("")),
                  std::invalid_argument);
  CHECK_THROWS_AS(raa::rho_closed_form_2x2(1.0, 0.5, 1.0), std::invalid_argument);

  CHECK(raa::rho_closed_form_2x2(0.5, -0.5, 1.0) ==
        Catch::Approx(std::pow(0.05, 0.25)).epsilon(1e-14));
}

TEST_CASE("worst-case rates have closed forms", "[convergence]") {
  SECTION("opposite eigenvalues tie with plain iteration exactly") {
    const raa::WorstCase wc = raa::worst_case_2x2(0.5, -0.5);
    CHECK(wc.rho_aa == 0.5);
    CHECK(wc.rho_picard == 0.5);
    CHECK(wc.eps_worst.first == Catch::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
    CHECK(wc.eps_worst.second == -wc.eps_worst.first);
    // Consistency: lambda at the argmax has fourth root exactly 1/2.
    CHECK(std::pow(raa::lambda_of_eps(0.5, -0.5, wc.eps_worst.first), 0.25) ==
          Catch::Approx(0.5).epsilon(1e-14));
  }
  SECTION("an expanding direction can still leave a contractive scheme") {
    const raa::WorstCase wc = raa::worst_case_2x2(2.0, 0.5);
    CHECK(wc.rho_aa == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(wc.rho_picard == 2.0);
  }
  SECTION("generic contractive pair") {
    const raa::WorstCase wc = raa::worst_case_2x2(0.9, 0.3);
    CHECK(wc.rho_aa == Catch::Approx(std::sqrt(0.54)).epsilon(1e-14));
    CHECK(wc.rho_picard == 0.9);
    CHECK(raa::norm(wc.r0_direction) == Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("degenerate spectra have zero worst rate") {
    CHECK(raa::worst_case_2x2(0.4, 0.4).rho_aa == 0.0);
    CHECK(raa::worst_case_2x2(0.0, 0.7).rho_aa == 0.0);
    CHECK(raa::worst_case_2x2(0.4, 0.4).r0_direction == raa::Vector{1.0, 0.0});
  }
  SECTION("the worst rate dominates a dense mix-ratio grid") {
    raa::SplitMix64 rng(31415);
    for (int trial = 0; trial < 40; ++trial) {
      const double m1 = rng.uniform_signed(0.05, 0.95);
      double m2 = rng.uniform_signed(0.05, 0.95);
      while (std::abs(m2 - m1) < 1e-3) m2 = rng.uniform_signed(0.05, 0.95);
      const double worst = raa::rho_aa_worst(m1, m2);
      for (int g = 0; g <= 400; ++g) {
        const double eps = std::pow(10.0, -2.0 + 4.0 * g / 400.0);
        CHECK(raa::rho_closed_form_2x2(m1, m2, eps) <= worst + 1e-12);
      }
    }
  }
}

TEST_CASE("simulations from the worst direction achieve the worst rate", "[convergence]") {
  for (const auto& [m1, m2] : {std::pair{0.9, 0.3}, std::pair{0.7, -0.7},
                               std::pair{-0.6, 0.35}}) {
    const raa::WorstCase wc = raa::worst_case_2x2(m1, m2);
    const Rotated2x2 inst = rotated(m1, m2, 0.9);
    const raa::IterationTrace tr = run_from_ratio(inst, 1.0, wc.eps_worst.first, 200);
    INFO("m1 " << m1 << " m2 " << m2);
    CHECK(raa::estimate_rho(tr) == Catch::Approx(wc.rho_aa).margin(1e-8));

    const raa::IterationTrace tn = run_from_ratio(inst, 1.0, wc.eps_worst.second, 200);
    CHECK(raa::estimate_rho(tn) == Catch::Approx(wc.rho_aa).margin(1e-8));
  }
}

TEST_CASE("comparison verdicts cover the characterization", "[convergence]") {
  const raa::Comparison eq = raa::compare_aa_vs_picard(0.5, -0.5);
  CHECK(eq.verdict == raa::Verdict::kEqualRates);
  CHECK(eq.contractive_nonzero);
  CHECK(eq.rho_aa == eq.rho_picard);

  const raa::Comparison strict = raa::compare_aa_vs_picard(0.9, 0.3);
  CHECK(strict.verdict == raa::Verdict::kAAStrictlyBetter);
  CHECK(strict.contractive_nonzero);
  CHECK(strict.rho_aa < strict.rho_picard);

  const raa::Comparison rescue = raa::compare_aa_vs_picard(2.0, 0.5);
  CHECK(rescue.verdict == raa::Verdict::kAAConvergesPicardDiverges);
  CHECK(!rescue.contractive_nonzero);
  CHECK(rescue.rho_aa == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));

  const raa::Comparison lost = raa::compare_aa_vs_picard(-1.5, 1.5);
  CHECK(lost.verdict == raa::Verdict::kBothDiverge);
  CHECK(lost.rho_aa >= 1.0);

  CHECK_THROWS_AS(raa::compare_aa_vs_picard(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("restarts never lose to plain iteration on contractive spectra", "[convergence]") {
  raa::SplitMix64 rng(161803);
  for (int trial = 0; trial < 200; ++trial) {
    const double m1 = rng.uniform_signed(0.05, 0.95);
    double m2 = rng.uniform_signed(0.05, 0.95);
    while (std::abs(m1 + m2) < 1e-6 || m1 == m2) m2 = rng.uniform_signed(0.05, 0.95);
    INFO("m1 " << m1 << " m2 " << m2);
    CHECK(raa::rho_aa_worst(m1, m2) < raa::rho_picard_worst(m1, m2));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const double m = rng.uniform_signed(0.05, 0.95);
    CHECK(raa::rho_aa_worst(m, -m) == raa::rho_picard_worst(m, -m));
  }
}

TEST_CASE("eigen mix ratio extraction", "[convergence]") {
  const Rotated2x2 inst = rotated(0.8, 0.3, 0.4);
  const auto& dec = inst.sys.spectrum();

  const raa::Vector mixed =
      raa::add(raa::scaled(dec.eigenvectors[0], 3.0), raa::scaled(dec.eigenvectors[1], 2.1));
  CHECK(raa::extract_eigen_ratio(dec, mixed) == Catch::Approx(0.7).epsilon(1e-12));
  CHECK(raa::extract_eigen_ratio(dec, dec.eigenvectors[0]) == 0.0);
  CHECK(raa::extract_eigen_ratio(dec, dec.eigenvectors[1]) == 0.0);
  CHECK_THROWS_AS(raa::extract_eigen_ratio(dec, {0.0, 0.0}), raa::DegenerateVectorError);
}

TEST_CASE("reports bundle empirical and closed-form rates", "[convergence]") {
  const Rotated2x2 inst = rotated(0.9, -0.9, 0.3);
  const raa::IterationTrace tr = run_from_ratio(inst, 1.0, 1.0, 60);

  const raa::ConvergenceReport rep =
      raa::make_report(inst.sys, tr, raa::Method::kRestartedAA1);
  REQUIRE(rep.rho_closed_form.has_value());
  CHECK(rep.discrepancy <= 1e-10);
  CHECK(rep.last_step == 60);
  CHECK(rep.termination == raa::Termination::kMaxIters);

  const raa::IterationTrace pi = raa::run_picard(inst.sys, {0.3, 0.7}, {60, 0.0, 1e12});
  const raa::ConvergenceReport prep = raa::make_report(inst.sys, pi, raa::Method::kPicard);
  CHECK(!prep.rho_closed_form.has_value());
  CHECK(prep.rho_empirical == Catch::Approx(0.9).margin(1e-6));

  // Short non-exact runs report an unavailable empirical rate.
  const raa::IterationTrace shortrun = run_from_ratio(inst, 1.0, 1.0, 6);
  const raa::ConvergenceReport srep =
      raa::make_report(inst.sys, shortrun, raa::Method::kRestartedAA1);
  CHECK(std::isnan(srep.rho_empirical));
}

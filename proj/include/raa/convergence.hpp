#pragma once

// Asymptotic root-convergence rates: an empirical estimator on recorded
// traces and the closed-form rates for two-eigendirection residuals.
//
// On the plane of eigenvalues (m_1, m_2), a restarted run started at mix
// ratio eps contracts by lambda(eps) every four steps, so its per-step rate
// is lambda(eps)^(1/4). The worst rate over starting residuals is
//   rho_aa_worst = sqrt(|m_1 m_2 (m_2 - m_1)| / (|m_1 (m_1-1)| + |m_2 (m_2-1)|)),
// against max(|m_1|, |m_2|) for plain iteration. For a contractive spectrum
// the restarted rate never loses, and ties exactly when m_2 = -m_1.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "linalg.hpp"
#include "propagator.hpp"
#include "solvers.hpp"
#include "system.hpp"

namespace raa {

enum class Method { kPicard, kRestartedAA1, kWindowedAA };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kPicard: return "picard";
    case Method::kRestartedAA1: return "aa1-restarted";
    case Method::kWindowedAA: return "aa-windowed";
  }
  return "unknown";
}

// Per-step contraction factor fitted on log residual norms from burn_in on.
// Restarted traces cycle with period four, so the fit shares one slope
// across the four phases (k mod 4) with a separate intercept each; on an
// exactly four-periodic sequence it returns the fourth root of the four-step
// factor with no transient bias. Returns 0 for runs that hit the exact
// solution before enough points accumulate.
inline double estimate_rho(const IterationTrace& trace, std::size_t burn_in = 8) {
  for (double nr : trace.residual_norms)
    if (nr == 0.0) return 0.0;

  std::vector<std::pair<std::size_t, double>> pts;  // (k, log ||r_k||)
  for (std::size_t k = burn_in; k < trace.residual_norms.size(); ++k)
    if (std::isfinite(trace.residual_norms[k]))
      pts.emplace_back(k, std::log(trace.residual_norms[k]));
  if (pts.size() < 8) {
    if (trace.termination == Termination::kExactSolution) return 0.0;
    throw std::invalid_argument("estimate_rho: trace too short past burn_in");
  }

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t phase = 0; phase < 4; ++phase) {
    double kbar = 0.0, ybar = 0.0;
    std::size_t count = 0;
    for (const auto& [k, y] : pts)
      if (k % 4 == phase) {
        kbar += static_cast<double>(k);
        ybar += y;
        ++count;
      }
    if (count < 2) continue;
    kbar /= static_cast<double>(count);
    ybar /= static_cast<double>(count);
    for (const auto& [k, y] : pts)
      if (k % 4 == phase) {
        const double dk = static_cast<double>(k) - kbar;
        sxx += dk * dk;
        sxy += dk * (y - ybar);
      }
  }
  if (sxx == 0.0) throw std::invalid_argument("estimate_rho: degenerate abscissa");
  return std::exp(sxy / sxx);
}

namespace detail {

inline void require_eigenvalues_usable(double m1, double m2, const char* who) {
  if (!std::isfinite(m1) || !std::isfinite(m2) ||
      std::abs(m1 - 1.0) <= 1e-12 || std::abs(m2 - 1.0) <= 1e-12)
    throw std::invalid_argument(std::string(who) + ": eigenvalue at 1 or non-finite");
}

}  // namespace detail

// Rate of the restarted scheme started at mix ratio eps on the plane of
// eigenvalues (m1, m2). eps of 0 or +-inf means a pure eigendirection, which
// the first cycle annihilates.
inline double rho_closed_form_2x2(double m1, double m2, double eps) {
  detail::require_eigenvalues_usable(m1, m2, "rho_closed_form_2x2");
  if (std::isnan(eps)) throw std::invalid_argument("rho_closed_form_2x2: eps is nan");
  if (eps == 0.0 || std::isinf(eps)) return 0.0;
  if (m1 == 0.0 || m2 == 0.0 || m1 == m2) return 0.0;
  return std::pow(lambda_of_eps(m1, m2, eps), 0.25);
}

inline double rho_picard_worst(double m1, double m2) {
  detail::require_eigenvalues_usable(m1, m2, "rho_picard_worst");
  return std::max(std::abs(m1), std::abs(m2));
}

// Worst rate of the restarted scheme over starting residuals on the plane.
inline double rho_aa_worst(double m1, double m2) {
  detail::require_eigenvalues_usable(m1, m2, "rho_aa_worst");
  if (m1 == 0.0 || m2 == 0.0 || m1 == m2) return 0.0;
  if (m2 == -m1 && std::abs(m1) < 1.0) return std::abs(m1);  // rate ties picard
  const double num = std::abs(m1 * m2 * (m2 - m1));
  const double den = std::abs(m1 * (m1 - 1.0)) + std::abs(m2 * (m2 - 1.0));
  return std::sqrt(num / den);
}

struct WorstCase {
  double rho_aa = 0.0;
  double rho_picard = 0.0;
  std::pair<double, double> eps_worst{0.0, 0.0};  // argmax mix ratios, one per sign
  Vector r0_direction;  // unit coefficients on (v_i, v_j) achieving rho_aa
};

inline WorstCase worst_case_2x2(double m1, double m2) {
  detail::require_eigenvalues_usable(m1, m2, "worst_case_2x2");
  WorstCase out;
  out.rho_picard = rho_picard_worst(m1, m2);
  out.rho_aa = rho_aa_worst(m1, m2);
  if (m1 == 0.0 || m2 == 0.0 || m1 == m2) {
    out.r0_direction = {1.0, 0.0};
    return out;
  }
  out.eps_worst = eps_extremal(m1, m2);
  out.r0_direction = normalized({1.0, out.eps_worst.first});
  return out;
}

enum class Verdict {
  kAAStrictlyBetter,
  kEqualRates,
  kAAConvergesPicardDiverges,
  kBothDiverge,
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kAAStrictlyBetter: return "aa-strictly-better";
    case Verdict::kEqualRates: return "equal-rates";
    case Verdict::kAAConvergesPicardDiverges: return "aa-converges-picard-diverges";
    case Verdict::kBothDiverge: return "both-diverge";
  }
  return "unknown";
}

struct Comparison {
  Verdict verdict = Verdict::kEqualRates;
  bool contractive_nonzero = false;  // both eigenvalues nonzero and contractive
  double rho_aa = 0.0;
  double rho_picard = 0.0;
};

inline Comparison compare_aa_vs_picard(double m1, double m2) {
  detail::require_eigenvalues_usable(m1, m2, "compare_aa_vs_picard");
  Comparison out;
  out.rho_aa = rho_aa_worst(m1, m2);
  out.rho_picard = rho_picard_worst(m1, m2);
  out.contractive_nonzero =
      m1 != 0.0 && m2 != 0.0 && std::abs(m1) < 1.0 && std::abs(m2) < 1.0;
  if (std::abs(m1 + m2) <= 1e-14 && std::abs(m1) < 1.0 && std::abs(m2) < 1.0)
    out.verdict = Verdict::kEqualRates;
  else if (out.rho_aa < 1.0 && out.rho_picard >= 1.0)
    out.verdict = Verdict::kAAConvergesPicardDiverges;
  else if (out.rho_aa >= 1.0)
    out.verdict = Verdict::kBothDiverge;
  else
    out.verdict = Verdict::kAAStrictlyBetter;
  return out;
}

// Mix ratio c_2 / c_1 of a residual against a two-dimensional eigenbasis.
// Returns 0 when either coefficient vanishes at the 1e-14 level: both such
// residuals are (numerically) pure eigendirections and contract to nothing
// within one cycle.
inline double extract_eigen_ratio(const SpectralDecomposition& dec, const Vector& r0) {
  if (dec.eigenvalues.size() != 2 || r0.size() != 2)
    throw std::invalid_argument("extract_eigen_ratio: needs a two-dimensional problem");
  const double nr = norm(r0);
  if (nr <= degenerate_threshold())
    throw DegenerateVectorError("extract_eigen_ratio: zero residual");
  const double c1 = dot(r0, dec.eigenvectors[0]);
  const double c2 = dot(r0, dec.eigenvectors[1]);
  if (std::abs(c1) <= 1e-14 * nr || std::abs(c2) <= 1e-14 * nr) return 0.0;
  return c2 / c1;
}

struct ConvergenceReport {
  Method method = Method::kPicard;
  double rho_empirical = 0.0;
  std::optional<double> rho_closed_form;  // restarted runs on 2x2 systems only
  double discrepancy = 0.0;               // |empirical - closed form| when both exist
  std::size_t last_step = 0;              // index of the final recorded iterate
  Termination termination = Termination::kMaxIters;
};

inline ConvergenceReport make_report(const SymmetricSystem& sys,
                                     const IterationTrace& trace, Method method) {
  ConvergenceReport rep;
  rep.method = method;
  rep.termination = trace.termination;
  rep.last_step = trace.residual_norms.empty() ? 0 : trace.residual_norms.size() - 1;
  try {
    rep.rho_empirical = estimate_rho(trace);
  } catch (const std::invalid_argument&) {
    rep.rho_empirical = std::numeric_limits<double>::quiet_NaN();  // run too short
  }
  if (method == Method::kRestartedAA1 && sys.dim() == 2) {
    const auto& dec = sys.spectrum();
    const double eps = extract_eigen_ratio(dec, trace.residuals.front());
    rep.rho_closed_form = rho_closed_form_2x2(dec.eigenvalues[0], dec.eigenvalues[1], eps);
    rep.discrepancy = std::abs(rep.rho_empirical - *rep.rho_closed_form);
  }
  return rep;
}

}  // namespace raa

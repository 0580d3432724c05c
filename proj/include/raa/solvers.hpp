#pragma once

// Fixed-point solvers on a SymmetricSystem: plain Picard iteration, windowed
// Anderson acceleration AA(m), and AA(1) restarted every other step.
//
// All drivers record the full history (iterates, residuals, residual norms,
// mixing coefficients). Residuals are advanced by the residual recursion
//   plain step:        r' = M r
//   accelerated step:  r' = M (r + sum_i beta_i (r - r_prev_i))
// rather than recomputed from the iterate, so recorded norms keep decaying
// cleanly below the roundoff floor of x - q(x). Recorded iterates still
// satisfy r_k = A x_k - b up to roundoff of the problem scale.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "system.hpp"

namespace raa {

struct SolverConfig {
  std::size_t max_iters = 100;
  double residual_tolerance = 0.0;  // absolute two-norm; 0 means run to max_iters
  double divergence_cap = 1e8;      // stop once ||r_k|| / ||r_0|| exceeds this
};

enum class Termination {
  kToleranceReached,
  kMaxIters,
  kExactSolution,  // residual at the roundoff floor of the problem scale
  kDiverged,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kToleranceReached: return "tolerance-reached";
    case Termination::kMaxIters: return "max-iters";
    case Termination::kExactSolution: return "exact-solution";
    case Termination::kDiverged: return "diverged";
  }
  return "unknown";
}

// One least-squares coefficient, tagged with the step that produced it.
// Steps mixing several history vectors emit one record per coefficient,
// ordered from the most recent difference to the oldest.
struct BetaRecord {
  std::size_t step;
  double value;
};

struct IterationTrace {
  std::vector<Vector> iterates;        // x_0 .. x_K
  std::vector<Vector> residuals;       // r_0 .. r_K
  std::vector<double> residual_norms;  // ||r_0|| .. ||r_K||
  std::vector<BetaRecord> betas;
  Termination termination = Termination::kMaxIters;
};

namespace detail {

inline void validate_start(const SymmetricSystem& sys, const Vector& x0,
                           const SolverConfig& cfg) {
  if (x0.size() != sys.dim())
    throw std::invalid_argument("solver: x0 dimension mismatch");
  if (!all_finite(x0))
    throw std::invalid_argument("solver: non-finite x0");
  if (cfg.max_iters == 0)
    throw std::invalid_argument("solver: max_iters must be at least 1");
  if (!(cfg.divergence_cap > 1.0))
    throw std::invalid_argument("solver: divergence_cap must exceed 1");
  if (!(cfg.residual_tolerance >= 0.0) || !std::isfinite(cfg.residual_tolerance))
    throw std::invalid_argument("solver: residual_tolerance must be finite and >= 0");
}

// Stopping decision for the norm recorded at step k, checked in fixed order:
// exact solution, tolerance, divergence, iteration cap.
class StopRule {
 public:
  StopRule(const SymmetricSystem& sys, const Vector& x0, double r0_norm,
           const SolverConfig& cfg)
      : exact_threshold_(degenerate_threshold(sys.problem_scale(x0))),
        tolerance_(cfg.residual_tolerance),
        r0_norm_(r0_norm),
        cap_(cfg.divergence_cap),
        max_iters_(cfg.max_iters) {}

  std::optional<Termination> operator()(std::size_t k, double nr) const {
    if (nr <= exact_threshold_) return Termination::kExactSolution;
    if (tolerance_ > 0.0 && nr <= tolerance_) return Termination::kToleranceReached;
    if (!std::isfinite(nr) || nr / r0_norm_ > cap_) return Termination::kDiverged;
    if (k == max_iters_) return Termination::kMaxIters;
    return std::nullopt;
  }

 private:
  double exact_threshold_;
  double tolerance_;
  double r0_norm_;
  double cap_;
  std::size_t max_iters_;
};

inline void record(IterationTrace& tr, Vector x, Vector r) {
  tr.residual_norms.push_back(norm(r));
  tr.iterates.push_back(std::move(x));
  tr.residuals.push_back(std::move(r));
}

}  // namespace detail

// Windowed Anderson acceleration with window size m:
//   x_{k+1} = q(x_k) + sum_{i=1}^{m_k} beta_i (q(x_k) - q(x_{k-i})),
//   m_k = min(m, k), beta minimizing ||r_k + sum_i beta_i (r_k - r_{k-i})||.
// m = 0 is exactly Picard iteration x_{k+1} = q(x_k).
inline IterationTrace run_windowed_aa(const SymmetricSystem& sys, const Vector& x0,
                                      std::size_t window, const SolverConfig& cfg) {
  detail::validate_start(sys, x0, cfg);
  IterationTrace tr;
  detail::record(tr, x0, sys.residual(x0));
  const detail::StopRule stop(sys, x0, tr.residual_norms[0], cfg);
  std::vector<Vector> q_hist;  // q(x_j) for j = 0 .. k-1

  for (std::size_t k = 0;; ++k) {
    if (auto t = stop(k, tr.residual_norms[k])) {
      tr.termination = *t;
      return tr;
    }
    const Vector& rk = tr.residuals[k];
    Vector qk = sys.q(tr.iterates[k]);
    const std::size_t mk = std::min(window, k);

    Vector xn, rn;
    if (mk == 0) {
      xn = qk;
      rn = sys.M().apply(rk);
    } else if (mk == 1) {
      // Scalar least squares on the last difference. A degenerate direction
      // with a nonzero residual cannot occur for an invertible system, so a
      // throw from scalar_lsq here indicates a broken invariant.
      const Vector d = sub(rk, tr.residuals[k - 1]);
      const double beta = scalar_lsq(rk, d, 0.0);
      tr.betas.push_back({k, beta});
      xn = add(qk, scaled(sub(qk, q_hist[k - 1]), beta));
      rn = sys.M().apply(add(rk, scaled(d, beta)));
    } else {
      // Least squares over the difference columns d_i = r_k - r_{k-i},
      // i = 1..m_k, via modified Gram-Schmidt. Columns are processed newest
      // first; a column (numerically) dependent on the newer ones is dropped
      // and keeps coefficient zero.
      std::vector<std::size_t> kept;
      std::vector<Vector> Q;
      std::vector<std::vector<double>> R;  // R[c][j]: row j of kept column c
      for (std::size_t i = 1; i <= mk; ++i) {
        Vector u = sub(rk, tr.residuals[k - i]);
        const double dn = norm(u);
        std::vector<double> col(Q.size() + 1, 0.0);
        for (std::size_t c = 0; c < Q.size(); ++c) {
          col[c] = dot(Q[c], u);
          axpy_inplace(-col[c], Q[c], u);
        }
        const double un = norm(u);
        if (dn == 0.0 || un <= 1e-12 * dn) continue;
        col[Q.size()] = un;
        kept.push_back(i);
        R.push_back(std::move(col));
        Q.push_back(scaled(u, 1.0 / un));
      }
      std::vector<double> beta(Q.size(), 0.0);
      for (std::size_t c = Q.size(); c-- > 0;) {
        double s = -dot(Q[c], rk);
        for (std::size_t j = c + 1; j < Q.size(); ++j) s -= R[j][c] * beta[j];
        beta[c] = s / R[c][c];
      }
      std::vector<double> beta_all(mk + 1, 0.0);
      for (std::size_t c = 0; c < kept.size(); ++c) beta_all[kept[c]] = beta[c];
      for (std::size_t i = 1; i <= mk; ++i) tr.betas.push_back({k, beta_all[i]});

      xn = qk;
      Vector racc = rk;
      for (std::size_t i = 1; i <= mk; ++i) {
        if (beta_all[i] == 0.0) continue;
        axpy_inplace(beta_all[i], sub(qk, q_hist[k - i]), xn);
        axpy_inplace(beta_all[i], sub(rk, tr.residuals[k - i]), racc);
      }
      rn = sys.M().apply(racc);
    }

    q_hist.push_back(std::move(qk));
    if (!all_finite(xn) || !all_finite(rn)) {
      tr.termination = Termination::kDiverged;
      return tr;
    }
    detail::record(tr, std::move(xn), std::move(rn));
  }
}

inline IterationTrace run_picard(const SymmetricSystem& sys, const Vector& x0,
                                 const SolverConfig& cfg) {
  return run_windowed_aa(sys, x0, 0, cfg);
}

// AA(1) restarted every other step: even k takes a plain Picard step, odd k
// mixes with the previous iterate,
//   x_{k+1} = q(x_k) + beta_k (q(x_k) - q(x_{k-1})),
// with scalar beta_k minimizing ||r_k + beta_k (r_k - r_{k-1})||, and the
// history is then discarded.
inline IterationTrace run_restarted_aa1(const SymmetricSystem& sys, const Vector& x0,
                                        const SolverConfig& cfg) {
  detail::validate_start(sys, x0, cfg);
  IterationTrace tr;
  detail::record(tr, x0, sys.residual(x0));
  const detail::StopRule stop(sys, x0, tr.residual_norms[0], cfg);
  Vector q_prev;

  for (std::size_t k = 0;; ++k) {
    if (auto t = stop(k, tr.residual_norms[k])) {
      tr.termination = *t;
      return tr;
    }
    const Vector& rk = tr.residuals[k];
    Vector qk = sys.q(tr.iterates[k]);

    Vector xn, rn;
    if (k % 2 == 0) {
      xn = qk;
      rn = sys.M().apply(rk);
    } else {
      const Vector d = sub(rk, tr.residuals[k - 1]);
      const double beta = scalar_lsq(rk, d, 0.0);
      tr.betas.push_back({k, beta});
      xn = add(qk, scaled(sub(qk, q_prev), beta));
      rn = sys.M().apply(add(rk, scaled(d, beta)));
    }

    q_prev = std::move(qk);
    if (!all_finite(xn) || !all_finite(rn)) {
      tr.termination = Termination::kDiverged;
      return tr;
    }
    detail::record(tr, std::move(xn), std::move(rn));
  }
}

// The mixing coefficient of a restarted step written as a Rayleigh quotient:
// for the Picard-step residual pair (r_prev, r = M r_prev),
//   beta = -1 + <A^{-1} y, y> / <y, y>,  y = A r_prev,
// evaluated with an actual linear solve. Cross-validates the least-squares
// coefficient computed by run_restarted_aa1 without touching its code path.
inline double beta_rayleigh(const SymmetricSystem& sys, const Vector& r_prev) {
  if (r_prev.size() != sys.dim())
    throw std::invalid_argument("beta_rayleigh: dimension mismatch");
  if (norm(r_prev) <= degenerate_threshold())
    throw DegenerateVectorError("beta_rayleigh: residual too small");
  const SymmetricMatrix A = sys.system_matrix();
  const Vector y = A.apply(r_prev);
  const Vector u = solve_linear(A, y);
  return -1.0 + dot(y, u) / dot(y, y);
}

// Starting iterate whose residual equals r0: solves A x = r0 + b.
inline Vector iterate_for_residual(const SymmetricSystem& sys, const Vector& r0) {
  return solve_linear(sys.system_matrix(), add(r0, sys.b()));
}

}  // namespace raa

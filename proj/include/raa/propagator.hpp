#pragma once

// Two-step residual propagator of the restarted scheme. One restart cycle
// (a plain step followed by a mixed step) maps the pre-cycle residual v to
//   P(v) = M (M v - beta(v) A v),   A = I - M,
//   beta(v) = -1 + <A v, v> / <A v, A v>,
// and this header provides P, beta, and their closed forms on residuals
// spanned by two eigendirections of M.
//
// For z = c_i (v_i + eps v_j) with M v = m v on both directions and
// a = 1 - m, writing f = c_i (a_j - a_i) eps / (a_i^2 + a_j^2 eps^2):
//   beta(z) = -1 + (a_i + a_j eps^2) / (a_i^2 + a_j^2 eps^2),
//   P(z)    = f (m_i a_j eps v_i - m_j a_i v_j),
//   P(P(z)) = lambda(eps) z,
//   lambda(eps) = (m_j - m_i)^2 / (a_i^2 + eps^2 a_j^2)
//              * (m_i m_j)^2 / (m_i^2 + m_j^2 / eps^2).
// The two-direction plane is invariant under P, and P is four-periodic on it
// up to the scale factor lambda(eps).

#include <cmath>
#include <stdexcept>
#include <utility>

#include "linalg.hpp"
#include "system.hpp"

namespace raa {

// Mixing coefficient of one restart cycle as a function of the residual the
// cycle starts from. Matches the scalar least-squares coefficient the
// restarted driver computes one plain step later.
inline double beta_coefficient(const SymmetricSystem& sys, const Vector& v) {
  if (v.size() != sys.dim())
    throw std::invalid_argument("beta_coefficient: dimension mismatch");
  if (norm(v) <= degenerate_threshold())
    throw DegenerateVectorError("beta_coefficient: residual too small");
  const Vector av = sys.system_matrix().apply(v);
  return -1.0 + dot(av, v) / dot(av, av);
}

inline Vector apply_propagator(const SymmetricSystem& sys, const Vector& v) {
  const double beta = beta_coefficient(sys, v);
  const Vector av = sys.system_matrix().apply(v);
  return sys.M().apply(sub(sys.M().apply(v), scaled(av, beta)));
}

// Two eigendirections of the contraction, selected as the plane the closed
// forms below act on.
struct EigenPairSelection {
  double m_i = 0.0;
  double m_j = 0.0;
  Vector v_i;
  Vector v_j;
  double a_i() const { return 1.0 - m_i; }
  double a_j() const { return 1.0 - m_j; }
};

inline EigenPairSelection make_eigen_pair_selection(double m_i, Vector v_i,
                                                    double m_j, Vector v_j) {
  if (v_i.size() != v_j.size() || v_i.empty())
    throw std::invalid_argument("eigen pair: dimension mismatch");
  if (!std::isfinite(m_i) || !std::isfinite(m_j))
    throw std::invalid_argument("eigen pair: non-finite eigenvalue");
  if (std::abs(m_i - 1.0) <= 1e-12 || std::abs(m_j - 1.0) <= 1e-12)
    throw std::invalid_argument("eigen pair: eigenvalue at 1");
  if (std::abs(norm(v_i) - 1.0) > 1e-12 || std::abs(norm(v_j) - 1.0) > 1e-12)
    throw std::invalid_argument("eigen pair: directions must be unit vectors");
  if (std::abs(dot(v_i, v_j)) > 1e-12)
    throw std::invalid_argument("eigen pair: directions must be orthogonal");
  return {m_i, m_j, std::move(v_i), std::move(v_j)};
}

// beta(z) for z = c_i (v_i + eps v_j); independent of c_i.
inline double beta_closed_form(const EigenPairSelection& s, double eps) {
  if (!std::isfinite(eps)) throw std::invalid_argument("beta_closed_form: bad eps");
  const double ai = s.a_i(), aj = s.a_j();
  const double e2 = eps * eps;
  return -1.0 + (ai + aj * e2) / (ai * ai + aj * aj * e2);
}

// P(z) for z = c_i (v_i + eps v_j).
inline Vector two_step_image_closed_form(const EigenPairSelection& s, double c_i,
                                         double eps) {
  if (!std::isfinite(eps) || !std::isfinite(c_i) || c_i == 0.0)
    throw std::invalid_argument("two_step_image_closed_form: bad coefficients");
  const double ai = s.a_i(), aj = s.a_j();
  const double f = c_i * (aj - ai) * eps / (ai * ai + aj * aj * eps * eps);
  return add(scaled(s.v_i, f * s.m_i * aj * eps), scaled(s.v_j, -f * s.m_j * ai));
}

// Four-step contraction factor on the plane of eigenvalues (m_i, m_j) at mix
// ratio eps. Even in eps by construction (eps enters only squared).
inline double lambda_of_eps(double m_i, double m_j, double eps) {
  if (!std::isfinite(m_i) || !std::isfinite(m_j) ||
      std::abs(m_i - 1.0) <= 1e-12 || std::abs(m_j - 1.0) <= 1e-12)
    throw std::invalid_argument("lambda_of_eps: bad eigenvalues");
  if (!std::isfinite(eps) || eps == 0.0)
    throw std::invalid_argument("lambda_of_eps: eps must be finite and nonzero");
  const double ai = 1.0 - m_i, aj = 1.0 - m_j;
  const double e2 = eps * eps;
  const double diff = m_j - m_i;
  return (diff * diff) / (ai * ai + e2 * aj * aj) *
         ((m_i * m_j) * (m_i * m_j)) / (m_i * m_i + (m_j * m_j) / e2);
}

// Mix ratios maximizing lambda_of_eps over eps, one per sign.
inline std::pair<double, double> eps_extremal(double m_i, double m_j) {
  if (!std::isfinite(m_i) || !std::isfinite(m_j) || m_i == 0.0 || m_j == 0.0)
    throw std::invalid_argument("eps_extremal: eigenvalues must be nonzero");
  if (std::abs(m_i - 1.0) <= 1e-12 || std::abs(m_j - 1.0) <= 1e-12)
    throw std::invalid_argument("eps_extremal: eigenvalue at 1");
  const double e = std::sqrt(std::abs((m_j * (m_i - 1.0)) / (m_i * (m_j - 1.0))));
  return {e, -e};
}

// max over eps of lambda_of_eps, in closed form.
inline double lambda_extremal(double m_i, double m_j) {
  if (!std::isfinite(m_i) || !std::isfinite(m_j))
    throw std::invalid_argument("lambda_extremal: non-finite eigenvalues");
  if (std::abs(m_i - 1.0) <= 1e-12 || std::abs(m_j - 1.0) <= 1e-12)
    throw std::invalid_argument("lambda_extremal: eigenvalue at 1");
  const double num = m_i * m_j * (m_j - m_i);
  const double den = std::abs(m_i * (m_i - 1.0)) + std::abs(m_j * (m_j - 1.0));
  const double q = num / den;
  return q * q;
}

struct FourStepCheck {
  double discrepancy = 0.0;      // ||P(P(z)) - lambda_estimate z|| / ||z||
  double lambda_estimate = 0.0;  // <P(P(z)), z> / <z, z>
  bool degenerate = false;       // P(z) vanished, so the four-step image is 0
};

// Measures how close P(P(z)) is to a scalar multiple of z.
inline FourStepCheck verify_four_periodicity(const SymmetricSystem& sys,
                                             const Vector& z) {
  const double nz = norm(z);
  if (z.size() != sys.dim() || nz <= degenerate_threshold())
    throw std::invalid_argument("verify_four_periodicity: bad start residual");
  const Vector pz = apply_propagator(sys, z);
  if (norm(pz) <= degenerate_threshold(nz)) return {0.0, 0.0, true};
  const Vector ppz = apply_propagator(sys, pz);
  const double lam = dot(ppz, z) / dot(z, z);
  return {norm(sub(ppz, scaled(z, lam))) / nz, lam, false};
}

}  // namespace raa

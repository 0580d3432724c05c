#pragma once

// Shared test helpers. Oracles here are written independently of the library
// paths they check.

#include <cmath>
#include <cstddef>

#include <raa/linalg.hpp>
#include <raa/random.hpp>

namespace testsupport {

// Golden-section minimizer over [lo, hi]; returns the midpoint of the final
// bracket of width <= tol.
template <class F>
double golden_section_min(F f, double lo, double hi, double tol) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Golden-section bracketing followed by one quadratic-vertex refinement;
// comparison-only search stalls near sqrt(eps), the vertex step does not.
template <class F>
double search_min_quadratic(F f, double lo, double hi) {
  const double c = golden_section_min(f, lo, hi, 1e-4 * (hi - lo));
  const double h = 1e-3 * (hi - lo);
  const double fm = f(c - h);
  const double f0 = f(c);
  const double fp = f(c + h);
  const double denom = fp - 2.0 * f0 + fm;
  if (denom <= 0.0) return c;
  return c - h * (fp - fm) / (2.0 * denom);
}

inline double rel_diff(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// ||got - want|| / max(||want||, floor)
inline double vec_rel_diff(const raa::Vector& got, const raa::Vector& want,
                           double floor = 1e-300) {
  return raa::norm(raa::sub(got, want)) / std::max(raa::norm(want), floor);
}

// Random symmetric matrix with spectrum sampled away from 0 and 1, together
// with the spectrum used (ascending order is NOT guaranteed here).
struct SpectrumSample {
  raa::SymmetricMatrix M;
  raa::Vector eigenvalues;
  std::vector<raa::Vector> basis;
};

inline SpectrumSample random_contractive_symmetric(raa::SplitMix64& rng,
                                                   std::size_t n,
                                                   double min_mag = 0.05,
                                                   double max_mag = 0.95) {
  raa::Vector ev(n);
  for (std::size_t i = 0; i < n; ++i)
    ev[i] = rng.uniform_signed(min_mag, max_mag);
  auto basis = raa::random_orthonormal_basis(rng, n);
  return {raa::symmetric_from_spectrum(basis, ev), ev, basis};
}

}  // namespace testsupport

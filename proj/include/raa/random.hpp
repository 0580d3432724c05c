#pragma once

// Deterministic sampling utilities shared by the verify command and the test
// suites. The generator is SplitMix64: a 64-bit counter advanced by the
// golden-gamma constant and finalized with a mix, so a single seed fully
// determines every sampled instance.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"

namespace raa {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Independent stream derived from this one.
  SplitMix64 split() { return SplitMix64(next() ^ 0x5851f42d4c957f2dull); }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // magnitude uniform in [lo, hi], sign random
  double uniform_signed(double lo, double hi) {
    const double v = uniform(lo, hi);
    return (next() & 1u) ? v : -v;
  }

  // log-uniform magnitude in [lo, hi], lo > 0
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Columns of the planar rotation by theta, as an orthonormal pair.
inline std::vector<Vector> rotation_basis_2d(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {Vector{c, s}, Vector{-s, c}};
}

// Symmetric 2x2 with eigenpairs (m1, v1(theta)) and (m2, v2(theta)).
inline SymmetricMatrix symmetric_2x2(double m1, double m2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  SymmetricMatrix M(2);
  M.set(0, 0, m1 * c * c + m2 * s * s);
  M.set(1, 1, m1 * s * s + m2 * c * c);
  M.set(0, 1, (m1 - m2) * c * s);
  return M;
}

inline Vector gaussian_vector(SplitMix64& rng, std::size_t n) {
  Vector g(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = 1.0 - rng.uniform01();  // (0, 1]
    const double u2 = rng.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.28318530717958647692;
    g[i] = r * std::cos(kTwoPi * u2);
    if (i + 1 < n) g[i + 1] = r * std::sin(kTwoPi * u2);
  }
  return g;
}

// Gram-Schmidt basis of random gaussian vectors; redraws near-dependent ones.
inline std::vector<Vector> random_orthonormal_basis(SplitMix64& rng,
                                                    std::size_t n) {
  std::vector<Vector> basis;
  basis.reserve(n);
  while (basis.size() < n) {
    Vector u = gaussian_vector(rng, n);
    for (const Vector& q : basis) axpy_inplace(-dot(q, u), q, u);
    const double r = norm(u);
    if (r <= 1e-8) continue;
    basis.push_back(scaled(u, 1.0 / r));
  }
  return basis;
}

// V diag(eigenvalues) V^T with roundoff symmetrized away.
inline SymmetricMatrix symmetric_from_spectrum(const std::vector<Vector>& basis,
                                               const Vector& eigenvalues) {
  const std::size_t n = eigenvalues.size();
  if (basis.size() != n)
    throw std::invalid_argument("symmetric_from_spectrum: size mismatch");
  std::vector<double> b(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (basis[k].size() != n)
      throw std::invalid_argument("symmetric_from_spectrum: bad basis vector");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        b[i * n + j] += eigenvalues[k] * basis[k][i] * basis[k][j];
  }
  return SymmetricMatrix::symmetrized(n, b);
}

}  // namespace raa

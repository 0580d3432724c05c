#pragma once

// Affine fixed-point problem q(x) = M x + b with symmetric M. The residual
// of an iterate is r = x - q(x) = A x - b with A = I - M; construction
// rejects systems where A is (numerically) singular.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "linalg.hpp"

namespace raa {

class SymmetricSystem {
 public:
  SymmetricSystem(SymmetricMatrix M, Vector b)
      : M_(std::move(M)), b_(std::move(b)), spectrum_(eig_sym(M_)) {
    if (b_.size() != M_.dim())
      throw std::invalid_argument("SymmetricSystem: b dimension mismatch");
    if (!all_finite(b_))
      throw std::invalid_argument("SymmetricSystem: non-finite b");
    for (double m : spectrum_.eigenvalues)
      if (std::abs(m - 1.0) <= 1e-12)
        throw std::invalid_argument(
            "SymmetricSystem: I - M is singular (eigenvalue of M at 1)");
  }

  const SymmetricMatrix& M() const { return M_; }
  const Vector& b() const { return b_; }
  std::size_t dim() const { return M_.dim(); }

  // Eigendecomposition of M, computed once at construction.
  const SpectralDecomposition& spectrum() const { return spectrum_; }

  Vector q(const Vector& x) const { return add(M_.apply(x), b_); }

  Vector residual(const Vector& x) const { return sub(x, q(x)); }

  SymmetricMatrix system_matrix() const {
    SymmetricMatrix A(dim());
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = i; j < dim(); ++j)
        A.set(i, j, (i == j ? 1.0 : 0.0) - M_(i, j));
    return A;
  }

  // Scale used for degenerate-residual thresholds.
  double problem_scale(const Vector& x0) const { return norm(b_) + norm(x0); }

 private:
  SymmetricMatrix M_;
  Vector b_;
  SpectralDecomposition spectrum_;
};

}  // namespace raa

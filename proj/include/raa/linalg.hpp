#pragma once

// Dense symmetric linear algebra kernels: vectors, a symmetry-enforcing
// matrix type, cyclic Jacobi eigendecomposition, scalar least squares and
// Rayleigh quotients. Everything is float64 and header-only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace raa {

using Vector = std::vector<double>;

// Vectors at or below this norm are treated as "already at the exact
// solution". scale is the problem scale (||b|| + ||x0|| in solver context,
// 1 for standalone calls).
inline double degenerate_threshold(double scale = 1.0) {
  return 1e-14 * std::max(1.0, scale);
}

// Signals that an input direction is degenerate, i.e. the underlying
// iteration has already reached the exact solution.
class DegenerateVectorError : public std::domain_error {
 public:
  explicit DegenerateVectorError(const std::string& what)
      : std::domain_error(what) {}
};

inline double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const Vector& x) { return std::sqrt(dot(x, x)); }

inline Vector add(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("add: size mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
  return z;
}

inline Vector sub(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sub: size mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

inline Vector scaled(const Vector& x, double c) {
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = c * x[i];
  return z;
}

// y += a * x
inline void axpy_inplace(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(const Vector& x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

inline Vector normalized(const Vector& x) {
  const double n = norm(x);
  if (n <= degenerate_threshold())
    throw DegenerateVectorError("normalized: vector is degenerate");
  return scaled(x, 1.0 / n);
}

// Dense symmetric matrix with full row-major storage. set() writes both
// triangles, so entries (i,j) and (j,i) are always bit-identical.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    if (n == 0)
      throw std::invalid_argument("SymmetricMatrix: dimension must be > 0");
  }

  static SymmetricMatrix identity(std::size_t n) {
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.a_[i * n + i] = 1.0;
    return m;
  }

  // Requires exact (bitwise) symmetry; use symmetrized() for input that is
  // symmetric only up to roundoff.
  static SymmetricMatrix from_row_major(std::size_t n,
                                        const std::vector<double>& e) {
    check_shape(n, e);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (e[i * n + j] != e[j * n + i])
          throw std::invalid_argument(
              "SymmetricMatrix: entries are not exactly symmetric");
    SymmetricMatrix m(n);
    m.a_ = e;
    return m;
  }

  // Averages mirrored entries.
  static SymmetricMatrix symmetrized(std::size_t n,
                                     const std::vector<double>& e) {
    check_shape(n, e);
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.a_[i * n + i] = e[i * n + i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 0.5 * (e[i * n + j] + e[j * n + i]);
        m.a_[i * n + j] = v;
        m.a_[j * n + i] = v;
      }
    }
    return m;
  }

  std::size_t dim() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }

  void set(std::size_t i, std::size_t j, double v) {
    if (i >= n_ || j >= n_)
      throw std::invalid_argument("SymmetricMatrix::set: index out of range");
    if (!std::isfinite(v))
      throw std::invalid_argument("SymmetricMatrix::set: non-finite entry");
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }

  Vector apply(const Vector& x) const {
    if (x.size() != n_)
      throw std::invalid_argument("SymmetricMatrix::apply: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  const std::vector<double>& data() const { return a_; }

 private:
  static void check_shape(std::size_t n, const std::vector<double>& e) {
    if (n == 0 || e.size() != n * n)
      throw std::invalid_argument("SymmetricMatrix: bad entry count");
    for (double v : e)
      if (!std::isfinite(v))
        throw std::invalid_argument("SymmetricMatrix: non-finite entry");
  }

  std::size_t n_;
  std::vector<double> a_;
};

struct SpectralDecomposition {
  Vector eigenvalues;                  // ascending
  std::vector<Vector> eigenvectors;    // eigenvectors[i] pairs with eigenvalues[i]
};

// Cyclic Jacobi with a fixed (p, q) sweep order, iterated until the
// off-diagonal norm falls below 1e-15 of the input Frobenius norm.
inline SpectralDecomposition eig_sym(const SymmetricMatrix& M) {
  const std::size_t n = M.dim();
  std::vector<double> a = M.data();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double frob = 0.0;
  for (double e : a) frob += e * e;
  frob = std::sqrt(frob);

  if (frob > 0.0) {
    const double stop = 1e-15 * frob;
    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      double off2 = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
          off2 += 2.0 * a[p * n + q] * a[p * n + q];
      if (std::sqrt(off2) <= stop) break;

      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = a[p * n + q];
          if (apq == 0.0) continue;
          const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
          double t;
          if (std::abs(theta) > 1e150) {
            t = 1.0 / (2.0 * theta);
          } else {
            t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          const double tau = s / (1.0 + c);

          const double app = a[p * n + p];
          const double aqq = a[q * n + q];
          a[p * n + p] = app - t * apq;
          a[q * n + q] = aqq + t * apq;
          a[p * n + q] = 0.0;
          a[q * n + p] = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            if (r == p || r == q) continue;
            const double arp = a[r * n + p];
            const double arq = a[r * n + q];
            a[r * n + p] = arp - s * (arq + tau * arp);
            a[p * n + r] = a[r * n + p];
            a[r * n + q] = arq + s * (arp - tau * arq);
            a[q * n + r] = a[r * n + q];
          }
          for (std::size_t r = 0; r < n; ++r) {
            const double vrp = v[r * n + p];
            const double vrq = v[r * n + q];
            v[r * n + p] = vrp - s * (vrq + tau * vrp);
            v[r * n + q] = vrq + s * (vrp - tau * vrq);
          }
        }
      }
    }
    if (sweep == kMaxSweeps)
      throw std::runtime_error("eig_sym: Jacobi sweep limit exceeded");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] < a[j * n + j];
  });

  SpectralDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors.assign(n, Vector(n));
  for (std::size_t k = 0; k < n; ++k) {
    d.eigenvalues[k] = a[order[k] * n + order[k]];
    for (std::size_t r = 0; r < n; ++r)
      d.eigenvectors[k][r] = v[r * n + order[k]];
  }
  return d;
}

// Spectral 2-norm (largest eigenvalue magnitude).
inline double spectral_norm(const SymmetricMatrix& M) {
  double r = 0.0;
  for (double m : eig_sym(M).eigenvalues) r = std::max(r, std::abs(m));
  return r;
}

// R(S, y) = y'Sy / y'y
inline double rayleigh_quotient(const SymmetricMatrix& S, const Vector& y) {
  if (S.dim() != y.size())
    throw std::invalid_argument("rayleigh_quotient: size mismatch");
  const double yy = dot(y, y);
  if (std::sqrt(yy) <= degenerate_threshold())
    throw DegenerateVectorError("rayleigh_quotient: vector is degenerate");
  return dot(y, S.apply(y)) / yy;
}

// argmin_b || target + b * direction ||_2 = -(direction . target) / ||direction||^2.
// A degenerate direction means consecutive residuals coincide, which only
// happens once the exact solution is reached; callers that have already
// excluded that case may pass threshold 0 to accept any nonzero direction.
inline double scalar_lsq(const Vector& target, const Vector& direction,
                         double threshold = degenerate_threshold()) {
  if (target.size() != direction.size())
    throw std::invalid_argument("scalar_lsq: size mismatch");
  const double dd = dot(direction, direction);
  if (dd == 0.0 || std::sqrt(dd) <= threshold)
    throw DegenerateVectorError("scalar_lsq: direction is degenerate");
  return -dot(direction, target) / dd;
}

// Dense LU with partial pivoting. Throws on numerically singular pivots.
inline Vector solve_linear(const SymmetricMatrix& A, const Vector& rhs) {
  const std::size_t n = A.dim();
  if (rhs.size() != n)
    throw std::invalid_argument("solve_linear: size mismatch");
  std::vector<double> lu = A.data();
  Vector x = rhs;
  const double scale = std::max(1.0, A.frobenius_norm());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu[i * n + k]) > std::abs(lu[p * n + k])) p = i;
    if (std::abs(lu[p * n + k]) <= 1e-15 * scale)
      throw std::runtime_error("solve_linear: matrix is numerically singular");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu[p * n + j], lu[k * n + j]);
      std::swap(x[p], x[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu[i * n + k] / lu[k * n + k];
      lu[i * n + k] = f;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
      x[i] -= f * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu[i * n + j] * x[j];
    x[i] = s / lu[i * n + i];
  }
  return x;
}

namespace detail {

// Shortest round-trippable decimal form.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

}  // namespace raa

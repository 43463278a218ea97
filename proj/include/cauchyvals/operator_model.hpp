#pragma once

// Finite section of the unilateral shift and its global-local resolvent.
//
// The shift sends e_k to e_{k+1}; its self-commutator is e_0 (x) e_0 and its
// principal function is the indicator of the unit disc. For every lambda the
// equation (T - lambda)^* x = e_0 has a unique solution orthogonal to the
// kernel of (T - lambda)^*, and
//
//     E(z, w) = 1 - <x_w, x_z>
//
// reproduces exp C_g(z, w) for g the unit-disc indicator.
//
// In the N-dimensional section, (T - lambda)^* reads
//     x_{n+1} - conj(lambda) x_n = delta_{n0},   n = 0 .. N-2,
//     -conj(lambda) x_{N-1} = 0.
// The last row is an edge artifact of the truncation (it pins x_{N-1} = 0 and
// forces |x_0| = 1/|lambda|), so the resolvent is the minimum-norm solution of
// the first N-1 rows. That system is underdetermined with a one-dimensional
// kernel spanned by k_n = conj(lambda)^n.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/errors.hpp"

namespace cauchyvals {

class TruncatedShift {
 public:
  explicit TruncatedShift(std::size_t n) : n_(n) {
    if (n < 2) throw DomainError("TruncatedShift: dimension must be at least 2");
  }

  std::size_t dimension() const noexcept { return n_; }

  /// T x: (T x)_0 = 0, (T x)_{k+1} = x_k; the last coordinate falls off.
  std::vector<Complex> apply(const std::vector<Complex>& x) const {
    check(x);
    std::vector<Complex> y(n_, Complex(0.0, 0.0));
    for (std::size_t k = 0; k + 1 < n_; ++k) y[k + 1] = x[k];
    return y;
  }

  /// T^* x: the backward shift.
  std::vector<Complex> apply_adjoint(const std::vector<Complex>& x) const {
    check(x);
    std::vector<Complex> y(n_, Complex(0.0, 0.0));
    for (std::size_t k = 0; k + 1 < n_; ++k) y[k] = x[k + 1];
    return y;
  }

  /// Dense row-major matrix of T.
  std::vector<Complex> matrix() const {
    std::vector<Complex> m(n_ * n_, Complex(0.0, 0.0));
    for (std::size_t k = 0; k + 1 < n_; ++k) m[(k + 1) * n_ + k] = 1.0;
    return m;
  }

  /// phi = e_0.
  std::vector<Complex> phi() const {
    std::vector<Complex> e(n_, Complex(0.0, 0.0));
    e[0] = 1.0;
    return e;
  }

 private:
  void check(const std::vector<Complex>& x) const {
    if (x.size() != n_) throw DomainError("TruncatedShift: vector has the wrong dimension");
  }

  std::size_t n_;
};

inline TruncatedShift build_shift(std::size_t n) { return TruncatedShift(n); }

struct ResolventVector {
  Complex lambda;
  std::vector<Complex> coords;
  /// || rows 0..N-2 of (T - lambda)^* x - phi ||.
  double residual = 0.0;
  /// |<x, k>| / ||k|| for the kernel vector k.
  double kernel_overlap = 0.0;

  double norm() const {
    double s = 0.0;
    for (const auto& c : coords) s += std::norm(c);
    return std::sqrt(s);
  }
};

/// <a, b> = sum a_n conj(b_n).
inline Complex inner_product(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw DomainError("inner_product: dimension mismatch");
  Complex s(0.0, 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * std::conj(b[n]);
  return s;
}

namespace detail {

struct Givens {
  double c;
  Complex s;
};

/// G = [[c, s], [-conj(s), c]] with G (alpha, beta)^T = (r, 0)^T.
inline Givens make_givens(Complex alpha, Complex beta, Complex& r) {
  const double a = std::abs(alpha);
  const double rho = std::hypot(a, std::abs(beta));
  if (a == 0.0) {
    r = beta;
    return {0.0, Complex(1.0, 0.0)};
  }
  const Complex phase = alpha / a;
  r = phase * rho;
  return {a / rho, phase * std::conj(beta) / rho};
}

}  // namespace detail

/// Minimum-norm solution of the truncated (T - lambda)^* x = e_0, computed
/// from a Givens QR factorization of the (lower bidiagonal) adjoint matrix.
inline ResolventVector global_local_resolvent(const TruncatedShift& T, Complex lambda) {
  if (!is_finite(lambda)) throw DomainError("global_local_resolvent: non-finite lambda");
  const std::size_t N = T.dimension();
  const std::size_t m = N - 1;  // equations kept
  const Complex lc = std::conj(lambda);

  // B = A^H is N x m with B(n, n) = -lambda and B(n + 1, n) = 1.
  // Rotating rows (n, n + 1) clears B(n + 1, n) and leaves R upper bidiagonal.
  std::vector<Complex> diag(m), super(m, Complex(0.0, 0.0));
  std::vector<detail::Givens> rot(m);
  Complex alpha = -lambda;
  for (std::size_t n = 0; n < m; ++n) {
    Complex r;
    rot[n] = detail::make_givens(alpha, Complex(1.0, 0.0), r);
    diag[n] = r;
    if (n + 1 < m) {
      super[n] = rot[n].s * (-lambda);
      alpha = rot[n].c * (-lambda);
    }
  }

  // A = R^H Q^H, so x = Q [y; 0] with R^H y = e_0.
  std::vector<Complex> x(N, Complex(0.0, 0.0));
  for (std::size_t n = 0; n < m; ++n) {
    Complex rhs = n == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    if (n > 0) rhs -= std::conj(super[n - 1]) * x[n - 1];
    x[n] = rhs / std::conj(diag[n]);
  }
  for (std::size_t k = m; k-- > 0;) {
    const auto& g = rot[k];
    const Complex a = x[k], b = x[k + 1];
    x[k] = g.c * a - g.s * b;
    x[k + 1] = std::conj(g.s) * a + g.c * b;
  }

  ResolventVector out;
  out.lambda = lambda;
  double res2 = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    const Complex row = x[n + 1] - lc * x[n] - (n == 0 ? 1.0 : 0.0);
    res2 += std::norm(row);
  }
  out.residual = std::sqrt(res2);

  // Kernel vector k_n = conj(lambda)^n, normalized from whichever end is largest.
  std::vector<Complex> k(N);
  if (std::abs(lambda) <= 1.0) {
    k[0] = 1.0;
    for (std::size_t n = 1; n < N; ++n) k[n] = k[n - 1] * lc;
  } else {
    k[N - 1] = 1.0;
    for (std::size_t n = N - 1; n-- > 0;) k[n] = k[n + 1] / lc;
  }
  double knorm = 0.0;
  for (const auto& v : k) knorm += std::norm(v);
  out.kernel_overlap = std::abs(inner_product(x, k)) / std::sqrt(knorm);
  out.coords = std::move(x);

  const double scale = 1.0 + out.norm();
  if (!(out.residual <= 1e-9 * scale) || !(out.kernel_overlap <= 1e-9 * scale)) {
    throw NumericalError("global_local_resolvent: solve failed, residual " +
                         std::to_string(out.residual) + ", kernel overlap " +
                         std::to_string(out.kernel_overlap));
  }
  return out;
}

/// The N -> infinity resolvent: x_0 = -lambda, x_n = conj(lambda)^{n-1} (1 - |lambda|^2).
inline std::vector<Complex> resolvent_closed_form(std::size_t n, Complex lambda) {
  std::vector<Complex> x(n, Complex(0.0, 0.0));
  if (n == 0) return x;
  x[0] = -lambda;
  Complex p = 1.0 - std::norm(lambda);
  for (std::size_t k = 1; k < n; ++k) {
    x[k] = p;
    p *= std::conj(lambda);
  }
  return x;
}

/// 1 - <x_w, x_z>.
inline Complex e_operator(const TruncatedShift& T, Complex z, Complex w) {
  const ResolventVector xz = global_local_resolvent(T, z);
  const ResolventVector xw = global_local_resolvent(T, w);
  return 1.0 - inner_product(xw.coords, xz.coords);
}

/// Limit of e_operator as N -> infinity for |z|, |w| < 1 (and its continuous
/// extension to the closed disc away from conj(w) z = 1).
inline Complex e_shift_closed_form(Complex z, Complex w) {
  const Complex denom = 1.0 - std::conj(w) * z;
  if (denom == Complex(0.0, 0.0)) throw SingularityError("e_shift_closed_form: conj(w) z = 1");
  return 1.0 - w * std::conj(z) - (1.0 - std::norm(w)) * (1.0 - std::norm(z)) / denom;
}

}  // namespace cauchyvals

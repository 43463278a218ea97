#pragma once

// Closed-form objects attached to the two-point Cauchy transform
//
//     I_g = -(1/pi) * Int g(u) / (conj(u + 1) (u - 1)) da(u)
//
// The circles through -1 and +1 foliate the plane minus the real axis. The
// circle with inscribed chord angle theta has center i*cot(theta) and radius
// csc(theta); the indicator of the disc it bounds produces the extremal value
//
//     I_theta = ln(2 sin theta) + i (pi/2 - theta),
//
// and these values trace the boundary of the convex region Omega_1, the
// principal-logarithm image of the open disc |z - 1| < 1.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cauchyvals/errors.hpp"

namespace cauchyvals {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// An angle strictly inside (0, pi).
class ThetaAngle {
 public:
  explicit ThetaAngle(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < pi)) {
      throw DomainError("theta must lie in the open interval (0, pi), got " +
                        std::to_string(theta));
    }
  }

  double value() const noexcept { return theta_; }

  /// theta -> pi - theta, which reflects the circle across the real axis.
  ThetaAngle reflected() const { return ThetaAngle(pi - theta_); }

  friend bool operator==(ThetaAngle, ThetaAngle) = default;

 private:
  double theta_;
};

/// The circle through -1 and +1 with center i*cot(theta), radius csc(theta).
struct CircleTheta {
  ThetaAngle theta;
  Complex center;
  double radius;

  /// Membership in the open disc bounded by the circle.
  bool disc_contains(Complex u) const noexcept {
    return std::norm(u - center) < radius * radius;
  }
};

inline CircleTheta circle_for_theta(ThetaAngle theta) {
  const double t = theta.value();
  const double s = std::sin(t);
  return CircleTheta{theta, Complex(0.0, std::cos(t) / s), 1.0 / s};
}

/// The unique theta in (0, pi) whose circle passes through u.
///
/// cot(theta) = (|u|^2 - 1) / (2 Im u); evaluated through atan2 so that no
/// branch of arccot has to be chosen.
inline ThetaAngle theta_of(Complex u) {
  if (!(u.imag() != 0.0) || !is_finite(u)) {
    throw DomainError("theta_of: point on the real axis lies on no circle of the family");
  }
  double theta = std::atan2(2.0 * u.imag(), std::norm(u) - 1.0);
  if (theta < 0.0) theta += pi;
  return ThetaAngle(theta);
}

/// k(u) = -(1/pi) / (conj(u + 1) (u - 1)).
inline Complex kernel(Complex u) {
  if (u == Complex(1.0, 0.0) || u == Complex(-1.0, 0.0)) {
    throw SingularityError("kernel: u = +1 or u = -1 is a pole");
  }
  return -1.0 / (pi * std::conj(u + 1.0) * (u - 1.0));
}

/// Value of k on the circle through u, written in terms of theta(u).
/// Valid for |u| != 1, Im u != 0.
inline Complex kernel_on_circle(Complex u) {
  const double theta = theta_of(u).value();
  return std::cos(theta) * std::polar(1.0, -theta) / (pi * (1.0 - std::norm(u)));
}

/// Value of k on the unit circle, u != +-1.
inline Complex kernel_on_unit_circle(Complex u) {
  if (u.imag() == 0.0) throw SingularityError("kernel_on_unit_circle: u = +-1");
  return Complex(0.0, 1.0 / (2.0 * pi * u.imag()));
}

/// Closed-form extremal value for the disc indicator g_theta.
inline Complex i_theta(ThetaAngle theta) {
  const double t = theta.value();
  return {std::log(2.0 * std::sin(t)), 0.5 * pi - t};
}

enum class Omega1Location { interior, boundary, exterior };

inline const char* to_string(Omega1Location loc) noexcept {
  switch (loc) {
    case Omega1Location::interior: return "interior";
    case Omega1Location::boundary: return "boundary";
    case Omega1Location::exterior: return "exterior";
  }
  return "?";
}

/// |exp(p) - 1|; equals 1 exactly on the boundary curve of Omega_1.
inline double omega1_distance_proxy(Complex p) { return std::abs(std::exp(p) - 1.0); }

/// Classifies p against Omega_1 using d = |exp(p) - 1|.
///
/// Points with |Im p| >= pi/2 are always exterior: the curve endpoints are
/// limits, and such points lie on the wrong branch of the logarithm.
inline Omega1Location omega1_membership(Complex p, double tol = 1e-9) {
  if (!(tol > 0.0)) throw DomainError("omega1_membership: tol must be positive");
  if (std::abs(p.imag()) >= 0.5 * pi) return Omega1Location::exterior;
  const double d = omega1_distance_proxy(p);
  if (std::abs(d - 1.0) <= tol) return Omega1Location::boundary;
  if (d < 1.0 - tol) return Omega1Location::interior;
  return Omega1Location::exterior;
}

struct BoundarySample {
  double theta;
  Complex value;
};

/// n samples of the boundary curve theta -> ln(2 sin theta) + i(pi/2 - theta)
/// on a uniform grid of (0, pi) kept a small margin away from the endpoints.
/// Odd n always contains theta = pi/2.
inline std::vector<BoundarySample> omega1_boundary_samples(int n) {
  if (n < 2) throw DomainError("omega1_boundary_samples: need at least 2 samples");
  const double margin = 1e-4 * pi;
  const double step = (pi - 2.0 * margin) / (n - 1);
  std::vector<BoundarySample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double theta = margin + k * step;
    if (2 * k == n - 1) theta = 0.5 * pi;
    out.push_back({theta, i_theta(ThetaAngle(theta))});
  }
  return out;
}

}  // namespace cauchyvals

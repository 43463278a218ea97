#pragma once

// Two independent evaluation routes for the two-point Cauchy transform
//
//     C_g(z, w) = -(1/pi) Int g(u) / (conj(u - w) (u - z)) da(u).
//
// Planar route: direct area integral over the support box. Horizontal rows are
// split at the jumps of g and each constant piece is integrated in closed
// form. Discs around z and w are removed from the rows; annuli of a shrinking
// excision sequence are integrated in polar coordinates (where the 1/|u - p|
// singularity cancels against r dr) and the excised values are extrapolated
// linearly in the excision radius.
//
// Cylinder route: the substitution u(t, theta) = csc(theta) e^{it} + i cot(theta)
// over K = (-pi, pi] x (0, pi) whose Jacobian csc^3(theta) |sin t + cos theta|
// cancels the kernel denominator, leaving
//
//     I_g = (1/2pi) Int_U (-cot theta + i) g dt dtheta
//         + (1/2pi) Int_L ( cot theta - i) g dt dtheta,
//
// with U / L the open triangles where sin t + cos theta is positive / negative.
// For a fixed theta the coefficient is constant, so the inner integral is the
// t-measure of g along one circle; rows are split exactly at the zero set Z.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <valarray>
#include <vector>

#include "cauchyvals/adaptive.hpp"
#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/errors.hpp"
#include "cauchyvals/gfunction.hpp"

namespace cauchyvals {

struct QuadConfig {
  /// Samples per unit length along a line when searching for jumps of g.
  double planar_resolution = 128.0;
  /// Excision radii as multiples of |z - w| (of 1 for diagonal integrals).
  std::vector<double> excision_radii = default_excision_radii();
  /// Minimum samples per row piece on the cylinder.
  int cylinder_n_t = 32;
  /// Initial number of graded theta panels on the cylinder.
  int cylinder_n_theta = 16;
  double theta_grading_exponent = 2.0;
  double target_tol = 1e-8;
  /// Bisection budget of each adaptive outer integral.
  std::size_t max_refinements = 4000;
  /// Minimum log-growth coefficient before a diagonal integral is called divergent.
  double divergence_threshold = 0.05;

  static std::vector<double> default_excision_radii() {
    std::vector<double> r;
    for (int k = 0; k <= 16; ++k) r.push_back(0.1 * std::ldexp(1.0, -k));
    return r;
  }

  void validate() const {
    if (!(planar_resolution > 0.0) || !std::isfinite(planar_resolution)) {
      throw ConfigError("planar_resolution must be positive");
    }
    if (excision_radii.size() < 3) throw ConfigError("excision_radii needs at least 3 entries");
    for (std::size_t i = 0; i < excision_radii.size(); ++i) {
      if (!(excision_radii[i] > 0.0)) throw ConfigError("excision_radii must be positive");
      if (i > 0 && !(excision_radii[i] < excision_radii[i - 1])) {
        throw ConfigError("excision_radii must be strictly decreasing");
      }
    }
    if (excision_radii.front() >= 0.5) throw ConfigError("excision_radii must stay below 0.5");
    if (cylinder_n_t < 1 || cylinder_n_theta < 2) throw ConfigError("cylinder_grid too small");
    if (!(theta_grading_exponent >= 1.0)) throw ConfigError("theta_grading_exponent must be >= 1");
    if (!(target_tol > 0.0)) throw ConfigError("target_tol must be positive");
    if (max_refinements < 1) throw ConfigError("max_refinements must be >= 1");
    if (!(divergence_threshold > 0.0)) throw ConfigError("divergence_threshold must be positive");
  }
};

struct IntegralResult {
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  /// Empty unless something prevented convergence.
  std::string note;
};

// ---------------------------------------------------------------------------
// Cylinder map

enum class CylinderTag { U, L, Z };

/// sin t + cos theta, written as a product so it stays accurate near Z.
inline double zero_set_factor(double t, double theta) noexcept {
  return 2.0 * std::sin(0.5 * (t + 0.5 * pi - theta)) * std::cos(0.5 * (t - 0.5 * pi + theta));
}

struct CylinderPoint {
  double t;
  double theta;
  CylinderTag tag;

  /// Normalizes t into (-pi, pi] and tags the point by the sign of sin t + cos theta.
  static CylinderPoint make(double t, double theta) {
    if (!(theta > 0.0 && theta < pi)) throw DomainError("cylinder point: theta must lie in (0, pi)");
    double tn = std::remainder(t, 2.0 * pi);
    if (tn <= -pi) tn += 2.0 * pi;
    const double s = zero_set_factor(tn, theta);
    const CylinderTag tag = s > 0.0 ? CylinderTag::U : (s < 0.0 ? CylinderTag::L : CylinderTag::Z);
    return {tn, theta, tag};
  }
};

inline void require_cylinder_theta(double theta, const char* who) {
  if (!(theta > 0.0 && theta < pi)) {
    throw DomainError(std::string(who) + ": theta must lie in (0, pi)");
  }
}

/// u(t, theta) = csc(theta) e^{it} + i cot(theta).
inline Complex map_u(double t, double theta) {
  require_cylinder_theta(theta, "map_u");
  const double s = std::sin(theta);
  return {std::cos(t) / s, zero_set_factor(t, theta) / s};
}

/// Area element of the cylinder map: csc^3(theta) |sin t + cos theta|.
inline double jacobian(double t, double theta) {
  require_cylinder_theta(theta, "jacobian");
  const double s = std::sin(theta);
  return std::abs(zero_set_factor(t, theta)) / (s * s * s);
}

/// k(u(t, theta)) = -(1/2pi) (cot theta - i) / (csc^3 theta (sin t + cos theta)).
inline Complex parametrized_kernel(double t, double theta) {
  require_cylinder_theta(theta, "parametrized_kernel");
  const double zf = zero_set_factor(t, theta);
  if (zf == 0.0) throw SingularityError("parametrized_kernel: point on the zero set Z");
  const double s = std::sin(theta);
  const Complex coeff(std::cos(theta) / s, -1.0);
  return -coeff * (s * s * s) / (2.0 * pi * zf);
}

/// Pointwise coefficient of g in the cylinder integrand:
/// (-cot theta + i)/(2pi) on U, (cot theta - i)/(2pi) on L.
inline Complex cylinder_coefficient(double t, double theta) {
  const double zf = zero_set_factor(t, theta);
  if (zf == 0.0) throw SingularityError("cylinder_coefficient: point on the zero set Z");
  const Complex c(-std::cos(theta) / std::sin(theta), 1.0);
  return (zf > 0.0 ? c : -c) / (2.0 * pi);
}

enum class Region { A, B, C, D, E, F, boundary };

inline const char* to_string(Region r) noexcept {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    case Region::D: return "D";
    case Region::E: return "E";
    case Region::F: return "F";
    case Region::boundary: return "boundary";
  }
  return "?";
}

/// Six-region decomposition of the cylinder relative to the circle angle phi.
/// L splits into A (theta > pi/2), B (phi < theta < pi/2), C (theta < phi);
/// U likewise into D, E, F. C u D u E is the preimage of the disc D_phi.
inline Region classify_region(double t, double theta, ThetaAngle phi) {
  const double p = phi.value();
  if (!(p < 0.5 * pi)) {
    throw DomainError("classify_region: phi must lie in (0, pi/2); reflect larger angles");
  }
  const CylinderPoint cp = CylinderPoint::make(t, theta);
  if (cp.tag == CylinderTag::Z || theta == p || theta == 0.5 * pi) return Region::boundary;
  const bool high = theta > 0.5 * pi;
  const bool low = theta < p;
  if (cp.tag == CylinderTag::L) return high ? Region::A : (low ? Region::C : Region::B);
  return high ? Region::D : (low ? Region::F : Region::E);
}

// ---------------------------------------------------------------------------
// Preimage geometry of a disc |u| < R

struct PreimageGeometry {
  double R;
  double M;        // (R^2 + 1) / 2
  double theta_R;   // arccos((R^2 - 1) / (R^2 + 1))
  double theta_R0;  // zero of s1: M sin^2(theta) = 1
};

inline PreimageGeometry preimage_geometry(double R) {
  if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("preimage_geometry: need finite R > 1");
  const double M = 0.5 * (R * R + 1.0);
  return {R, M, std::acos((R * R - 1.0) / (R * R + 1.0)), std::asin(1.0 / std::sqrt(M))};
}

/// s1(theta) = arcsin((M sin^2 theta - 1) / cos theta): the t-boundary of the
/// preimage of |u| < R inside U for theta < pi/2.
inline double s1_curve(double theta, double R) {
  const PreimageGeometry geo = preimage_geometry(R);
  if (!(theta > 0.0 && theta < geo.theta_R) || theta == 0.5 * pi) {
    throw DomainError("s1_curve: theta outside (0, theta_R)");
  }
  const double s = std::sin(theta);
  const double arg = (geo.M * s * s - 1.0) / std::cos(theta);
  if (!(arg >= -1.0 && arg <= 1.0)) throw DomainError("s1_curve: arcsin argument outside [-1, 1]");
  return std::asin(arg);
}

/// The t-arc (unwrapped, length <= 2pi) on which |u(t, theta)| < R, if any.
inline std::optional<std::pair<double, double>> disc_arc(double theta, double R) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  if (c == 0.0) {
    if (R > 1.0) return std::pair{-pi, pi};
    return std::nullopt;
  }
  // |u|^2 < R^2  <=>  2 c sin t < R^2 s^2 - 1 - c^2. With center -pi/2 (c > 0)
  // or pi/2 (c < 0) the admissible t form an arc of half-width 2 asin(sqrt(q/2)).
  const double one_minus_abs_c =
      c > 0.0 ? 2.0 * std::pow(std::sin(0.5 * theta), 2) : 2.0 * std::pow(std::cos(0.5 * theta), 2);
  const double q = (R * R * s * s - one_minus_abs_c * one_minus_abs_c) / (2.0 * std::abs(c));
  if (!(q > 0.0)) return std::nullopt;
  if (q >= 2.0) return std::pair{-pi, pi};
  const double half_width = 2.0 * std::asin(std::sqrt(0.5 * q));
  const double center = c > 0.0 ? -0.5 * pi : 0.5 * pi;
  return std::pair{center - half_width, center + half_width};
}

// ---------------------------------------------------------------------------
// Row masses

struct RowMasses {
  double upper = 0.0;  // t-measure of g along the circle inside U
  double lower = 0.0;  // same inside L
};

namespace detail {

inline double sample_spacing(const QuadConfig& cfg) { return 1.0 / cfg.planar_resolution; }

inline bool resolves(const GSpec& g, const QuadConfig& cfg) {
  return sample_spacing(cfg) <= 0.5 * feature_scale(g);
}

inline std::size_t sample_count(double length, double spacing, std::size_t minimum) {
  const double n = std::ceil(length / spacing) + 1.0;
  constexpr double cap = 1 << 22;
  return std::max(minimum, static_cast<std::size_t>(std::min(n, cap)));
}

/// Splits [a, b] at the points of Z on the row theta and calls f(lo, hi, tag).
template <class F>
void for_each_zero_set_piece(double theta, double a, double b, F&& f) {
  std::vector<double> cuts{a, b};
  for (double base : {theta - 0.5 * pi, 1.5 * pi - theta}) {
    for (int k = -2; k <= 2; ++k) {
      const double t = base + 2.0 * pi * k;
      if (t > a && t < b) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double zf = zero_set_factor(0.5 * (lo + hi), theta);
    f(lo, hi, zf > 0.0 ? CylinderTag::U : CylinderTag::L);
  }
}

/// Cuts [a, b] at the exact boundary crossings of g along the curve, then
/// scans every piece at the sampling density of cfg as a safety net, and
/// calls emit(lo, hi, value) for each constant piece.
template <class Emit>
void for_each_constant_piece(const GSpec& g, const Curve& curve, double a, double b,
                             const QuadConfig& cfg, std::size_t min_samples, std::size_t& evals,
                             Emit&& emit) {
  std::vector<double> raw;
  boundary_crossings(g, curve, raw);
  std::vector<double> cuts{a, b};
  for (double s : raw) {
    if (!std::isfinite(s)) continue;
    if (curve.circle) {
      s -= 2.0 * pi * std::floor((s - a) / (2.0 * pi));
      for (; s < b; s += 2.0 * pi) {
        if (s > a) cuts.push_back(s);
      }
    } else if (s > a && s < b) {
      cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto value_at = [&](double s) {
    ++evals;
    return evaluate(g, curve.at(s));
  };
  const double spacing = sample_spacing(cfg);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const std::size_t n = sample_count(curve.speed() * (hi - lo), spacing, min_samples);
    adaptive::scan_constant_pieces(value_at, lo, hi, n, emit);
  }
}

inline std::vector<double> graded_theta_breaks(const QuadConfig& cfg) {
  const int half = std::max(1, cfg.cylinder_n_theta / 2);
  std::vector<double> breaks;
  for (int j = 0; j <= half; ++j) {
    const double x = 0.5 * pi * std::pow(static_cast<double>(j) / half, cfg.theta_grading_exponent);
    breaks.push_back(x);
    breaks.push_back(pi - x);
  }
  return breaks;
}

/// Solutions in (0, pi) of a sin(theta) + b cos(theta) = k.
inline void sin_cos_roots(double a, double b, double k, std::vector<double>& out) {
  const double rho = std::hypot(a, b);
  if (!(rho > 0.0)) return;
  const double ratio = k / rho;
  if (!(ratio >= -1.0 && ratio <= 1.0)) return;
  const double phi = std::atan2(a, b);
  const double d = std::acos(ratio);
  for (double s : {phi + d, phi - d}) {
    s = std::remainder(s, 2.0 * pi);
    if (s > 0.0 && s < pi) out.push_back(s);
  }
}

/// Pairwise intersection points of the boundary primitives.
inline std::vector<Complex> primitive_intersections(const BoundaryPrimitives& p) {
  std::vector<Complex> pts;
  const auto& C = p.circles;
  const auto& L = p.lines;
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::size_t j = i + 1; j < C.size(); ++j) {
      const Complex d = C[j].first - C[i].first;
      const double dist = std::abs(d);
      const double r0 = C[i].second, r1 = C[j].second;
      if (!(dist > 0.0) || dist > r0 + r1 || dist < std::abs(r0 - r1)) continue;
      const double a = (r0 * r0 - r1 * r1 + dist * dist) / (2.0 * dist);
      const double h = std::sqrt(std::max(0.0, r0 * r0 - a * a));
      const Complex e = d / dist;
      pts.push_back(C[i].first + e * Complex(a, h));
      pts.push_back(C[i].first + e * Complex(a, -h));
    }
  }
  for (const auto& [q, d] : L) {
    for (const auto& [c, r] : C) {
      const double s0 = (std::conj(d) * (c - q)).real();
      const double h2 = r * r - std::norm(q + s0 * d - c);
      if (!(h2 >= 0.0)) continue;
      pts.push_back(q + (s0 + std::sqrt(h2)) * d);
      pts.push_back(q + (s0 - std::sqrt(h2)) * d);
    }
  }
  for (std::size_t i = 0; i < L.size(); ++i) {
    for (std::size_t j = i + 1; j < L.size(); ++j) {
      const auto& [q0, d0] = L[i];
      const auto& [q1, d1] = L[j];
      const double cross = (std::conj(d0) * d1).imag();
      if (std::abs(cross) < 1e-14) continue;
      const double s = (std::conj(q1 - q0) * d1).imag() / cross;
      pts.push_back(q0 + s * d0);
    }
  }
  return pts;
}

/// Angles theta where the circle |u - i cot theta| = csc theta is tangent to a
/// boundary primitive of g or passes through an intersection of two of them;
/// the row masses are smooth between consecutive angles.
inline std::vector<double> tangency_angles(const GSpec& g) {
  const BoundaryPrimitives p = boundary_primitives(g);
  std::vector<double> out;
  // |C - c| = csc +- r reduces to (|c|^2 - r^2 - 1) sin - 2 c_y cos = +-2r.
  for (const auto& [c, r] : p.circles) {
    sin_cos_roots(std::norm(c) - r * r - 1.0, -2.0 * c.imag(), 2.0 * r, out);
    sin_cos_roots(std::norm(c) - r * r - 1.0, -2.0 * c.imag(), -2.0 * r, out);
  }
  // dist(C, line) = csc with unit normal n: n_y cos - <n, q> sin = +-1.
  for (const auto& [q, d] : p.lines) {
    const Complex n = d * Complex(0.0, 1.0);
    const double nq = (std::conj(n) * q).real();
    sin_cos_roots(-nq, n.imag(), 1.0, out);
    sin_cos_roots(-nq, n.imag(), -1.0, out);
  }
  for (const Complex& q : primitive_intersections(p)) {
    sin_cos_roots(std::norm(q) - 1.0, -2.0 * q.imag(), 0.0, out);
  }
  return out;
}

/// Graded breaks plus the tangency angles of g.
inline std::vector<double> cylinder_theta_breaks(const GSpec& g, const QuadConfig& cfg) {
  std::vector<double> breaks = graded_theta_breaks(cfg);
  const std::vector<double> t = tangency_angles(g);
  breaks.insert(breaks.end(), t.begin(), t.end());
  return breaks;
}

/// Heights where a horizontal row is tangent to a circle, runs along a
/// horizontal edge or passes through an intersection of two primitives.
inline std::vector<double> feature_heights(const GSpec& g) {
  const BoundaryPrimitives p = boundary_primitives(g);
  std::vector<double> out;
  for (const auto& [c, r] : p.circles) {
    out.push_back(c.imag() - r);
    out.push_back(c.imag() + r);
  }
  for (const auto& [q, d] : p.lines) {
    if (std::abs(d.imag()) < 1e-14) out.push_back(q.imag());
  }
  for (const Complex& q : primitive_intersections(p)) out.push_back(q.imag());
  return out;
}

/// Ray angles from center, in [0, 2 pi), where a ray is tangent to a circle,
/// parallel to a line or passes through an intersection of two primitives.
inline std::vector<double> feature_angles(const GSpec& g, Complex center) {
  const BoundaryPrimitives p = boundary_primitives(g);
  std::vector<double> out;
  auto push = [&](double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    out.push_back(a);
  };
  for (const auto& [c, r] : p.circles) {
    const Complex d = c - center;
    const double dist = std::abs(d);
    if (dist > r) {
      const double half = std::asin(r / dist);
      push(std::arg(d) - half);
      push(std::arg(d) + half);
    }
  }
  for (const auto& [q, d] : p.lines) {
    push(std::arg(d));
    push(std::arg(-d));
  }
  for (const Complex& q : primitive_intersections(p)) {
    if (q != center) push(std::arg(q - center));
  }
  return out;
}

/// Uniform breaks of [0, 2 pi] plus the feature angles of g around center.
inline std::vector<double> polar_breaks(const GSpec& g, Complex center) {
  std::vector<double> breaks;
  for (int k = 0; k <= 8; ++k) breaks.push_back(2.0 * pi * k / 8.0);
  const std::vector<double> a = feature_angles(g, center);
  breaks.insert(breaks.end(), a.begin(), a.end());
  return breaks;
}

}  // namespace detail

/// t-measure of g along the circle with angle theta, split into U and L.
/// Only the arc inside the disc of radius bound_radius is scanned.
inline RowMasses row_masses(const GSpec& g, double theta, double bound_radius,
                            const QuadConfig& cfg, std::size_t* evaluations = nullptr) {
  RowMasses out;
  const auto arc = disc_arc(theta, bound_radius);
  if (!arc) return out;
  const Curve circle{Complex(0.0, std::cos(theta) / std::sin(theta)), 1.0 / std::sin(theta), true};
  std::size_t evals = 0;
  detail::for_each_zero_set_piece(theta, arc->first, arc->second,
                                  [&](double lo, double hi, CylinderTag tag) {
    double mass = 0.0;
    detail::for_each_constant_piece(g, circle, lo, hi, cfg,
                                    static_cast<std::size_t>(cfg.cylinder_n_t), evals,
                                    [&](double a, double b, double v) {
                                      if (v != 0.0) mass += v * (b - a);
                                    });
    (tag == CylinderTag::U ? out.upper : out.lower) += mass;
  });
  if (evaluations) *evaluations += evals;
  return out;
}

/// t-lengths of the full row theta inside U and inside L.
inline RowMasses row_lengths(double theta) {
  RowMasses out;
  detail::for_each_zero_set_piece(theta, -pi, pi, [&](double lo, double hi, CylinderTag tag) {
    (tag == CylinderTag::U ? out.upper : out.lower) += hi - lo;
  });
  return out;
}

namespace detail {

inline double bounding_radius(const GSpec& g) {
  const double r = support_box(g).max_distance_from({0.0, 0.0});
  return r * (1.0 + 1e-9) + 1e-12;
}

inline IntegralResult unresolved(IntegralResult r, const GSpec& g, const QuadConfig& cfg) {
  if (!resolves(g, cfg)) {
    r.converged = false;
    r.note = "planar_resolution " + std::to_string(cfg.planar_resolution) +
             " cannot resolve features of size " + std::to_string(feature_scale(g));
  }
  return r;
}

}  // namespace detail

/// I_g through the cylinder parametrization.
inline IntegralResult cylinder_integrate(const GSpec& g, const QuadConfig& cfg = {}) {
  cfg.validate();
  const double R = detail::bounding_radius(g);
  std::size_t evals = 0;
  auto integrand = [&](double theta) {
    const RowMasses m = row_masses(g, theta, R, cfg, &evals);
    const double cot = std::cos(theta) / std::sin(theta);
    return Complex(cot * (m.lower - m.upper), m.upper - m.lower) / (2.0 * pi);
  };
  const auto est = adaptive::integrate(integrand, detail::cylinder_theta_breaks(g, cfg), cfg.target_tol,
                                       cfg.max_refinements);
  IntegralResult r;
  r.value = est.value;
  r.error_estimate = est.error;
  r.converged = est.converged;
  r.evaluations = evals;
  if (!est.converged) r.note = "theta refinement budget exhausted";
  return detail::unresolved(std::move(r), g, cfg);
}

/// (1/2pi) Int_{U u L} |cot theta| g(u(t, theta)) dt dtheta, adaptively.
inline IntegralResult lemma1_mass(const GSpec& g, const QuadConfig& cfg = {}) {
  cfg.validate();
  const double R = detail::bounding_radius(g);
  std::size_t evals = 0;
  auto integrand = [&](double theta) {
    const RowMasses m = row_masses(g, theta, R, cfg, &evals);
    return std::abs(std::cos(theta) / std::sin(theta)) * (m.upper + m.lower) / (2.0 * pi);
  };
  const auto est = adaptive::integrate(integrand, detail::cylinder_theta_breaks(g, cfg), cfg.target_tol,
                                       cfg.max_refinements);
  IntegralResult r;
  r.value = est.value;
  r.error_estimate = est.error;
  r.converged = est.converged;
  r.evaluations = evals;
  return detail::unresolved(std::move(r), g, cfg);
}

/// The same mass on fixed graded meshes, each level halving every panel.
inline std::vector<double> lemma1_mass_refinements(const GSpec& g, const QuadConfig& cfg,
                                                   int levels) {
  cfg.validate();
  const double R = detail::bounding_radius(g);
  auto integrand = [&](double theta) {
    const RowMasses m = row_masses(g, theta, R, cfg);
    return std::abs(std::cos(theta) / std::sin(theta)) * (m.upper + m.lower) / (2.0 * pi);
  };
  std::vector<double> out;
  for (int k = 0; k < levels; ++k) {
    out.push_back(adaptive::integrate_fixed(integrand, detail::cylinder_theta_breaks(g, cfg),
                                            std::size_t{1} << k)
                      .value);
  }
  return out;
}

struct TriangleAreas {
  double upper;
  double lower;
  double error;
};

/// Areas of U and L computed from the row partition of the cylinder.
inline TriangleAreas cylinder_region_areas(const QuadConfig& cfg = {}) {
  cfg.validate();
  const auto breaks = detail::graded_theta_breaks(cfg);
  const auto u = adaptive::integrate([](double th) { return row_lengths(th).upper; }, breaks,
                                     cfg.target_tol, cfg.max_refinements);
  const auto l = adaptive::integrate([](double th) { return row_lengths(th).lower; }, breaks,
                                     cfg.target_tol, cfg.max_refinements);
  return {u.value, l.value, u.error + l.error};
}

/// Integrates the cylinder coefficient over C u D u E (the preimage of D_phi),
/// theta first. For each t the theta-range is cut at phi, pi/2 and the Z
/// crossing, each piece is labelled by classify_region, and
/// Int cot = ln sin is applied on the pieces in D, E (U side) and C (L side).
inline IntegralResult region_iterated_integral(ThetaAngle phi, const QuadConfig& cfg = {}) {
  cfg.validate();
  const double p = phi.value();
  auto inner = [&](double t) {
    // acos(-sin t), written so that it stays accurate near t = -pi/2.
    double shifted = t + 0.5 * pi;
    if (shifted > pi) shifted -= 2.0 * pi;
    const double theta_z = std::abs(shifted);
    std::vector<double> cuts{0.0, pi, p, 0.5 * pi};
    if (theta_z > 0.0 && theta_z < pi) cuts.push_back(theta_z);
    std::sort(cuts.begin(), cuts.end());
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (!(b > a)) continue;
      const Region r = classify_region(t, 0.5 * (a + b), phi);
      double sign = 0.0;
      if (r == Region::D || r == Region::E) sign = 1.0;
      if (r == Region::C) sign = -1.0;
      if (sign == 0.0) continue;
      const double int_cot = std::log(std::sin(b) / std::sin(a));
      sum += sign * Complex(-int_cot, b - a);
    }
    return sum / (2.0 * pi);
  };
  // Kinks where the Z crossing meets phi or pi/2; log singularity at -pi/2.
  const std::vector<double> breaks{-pi, -0.5 * pi - p, -0.5 * pi, p - 0.5 * pi, 0.0, pi};
  const auto est = adaptive::integrate(inner, breaks, cfg.target_tol, cfg.max_refinements);
  IntegralResult r;
  r.value = est.value;
  r.error_estimate = est.error;
  r.converged = est.converged;
  r.evaluations = est.evaluations;
  return r;
}

// ---------------------------------------------------------------------------
// Planar engine

namespace detail {

/// Antiderivative in x of 1 / ((x - alpha)(x - beta)) along one row, with a
/// series form when alpha and beta nearly coincide.
class RowAntiderivative {
 public:
  RowAntiderivative(Complex alpha, Complex beta, double min_distance)
      : alpha_(alpha), beta_(beta), delta_(alpha - beta), mid_(0.5 * (alpha + beta)),
        series_(std::abs(alpha - beta) < 1e-3 * min_distance) {}

  Complex operator()(double x) const {
    if (series_) {
      const Complex d = x - mid_;
      return -1.0 / d - delta_ * delta_ / (12.0 * d * d * d);
    }
    return (std::log(x - alpha_) - std::log(x - beta_)) / delta_;
  }

 private:
  Complex alpha_, beta_, delta_, mid_;
  bool series_;
};

struct PolarAnnuli {
  std::valarray<Complex> values;  // one entry per annulus between radii k+1 and k
  double error = 0.0;
  bool converged = true;
};

/// Polar integration of -(1/pi) g / (conj(u - w)(u - z)) over the annuli
/// radii[k+1] < |u - center| < radii[k], center being z or w.
inline PolarAnnuli polar_annuli(const GSpec& g, Complex z, Complex w, bool around_z,
                                const std::vector<double>& radii, const QuadConfig& cfg,
                                double tol, std::size_t& evals) {
  const Complex center = around_z ? z : w;
  const std::size_t count = radii.size() - 1;
  auto integrand = [&](double phi) {
    const Complex dir = std::polar(1.0, phi);
    // Log(1 + r q / c) is an r-antiderivative of the polar integrand.
    const Complex q_over_c = around_z ? std::conj(dir) / std::conj(z - w) : dir / (w - z);
    auto anti = [&](double r) { return std::log(1.0 + r * q_over_c); };
    std::valarray<Complex> out(Complex(0.0, 0.0), count);
    for (std::size_t k = 0; k < count; ++k) {
      const double lo = radii[k + 1], hi = radii[k];
      Complex acc(0.0, 0.0);
      for_each_constant_piece(g, Curve{center, dir, false}, lo, hi, cfg, 2, evals,
                              [&](double a, double b, double v) {
                                if (v != 0.0) acc += v * (anti(b) - anti(a));
                              });
      out[k] = -acc / pi;
    }
    return out;
  };
  const auto est = adaptive::integrate(integrand, polar_breaks(g, center), tol, cfg.max_refinements);
  return {est.value, est.error, est.converged};
}

}  // namespace detail

/// C_g(z, w) by direct planar quadrature with excision and extrapolation.
inline IntegralResult planar_integrate(const GSpec& g, Complex z, Complex w,
                                       const QuadConfig& cfg = {}) {
  cfg.validate();
  if (z == w) throw DomainError("planar_integrate: z = w; use the diagonal integral");
  if (!is_finite(z) || !is_finite(w)) throw DomainError("planar_integrate: non-finite point");

  const BoundingBox box = support_box(g);
  const double sep = std::abs(z - w);
  std::vector<double> radii;
  for (double f : cfg.excision_radii) radii.push_back(f * sep);
  const double eps0 = radii.front();
  std::size_t evals = 0;

  auto row = [&](double y) {
    std::vector<std::pair<double, double>> holes;
    for (Complex p : {z, w}) {
      const double dy = y - p.imag();
      if (std::abs(dy) < eps0) {
        const double half = std::sqrt(eps0 * eps0 - dy * dy);
        holes.emplace_back(p.real() - half, p.real() + half);
      }
    }
    std::sort(holes.begin(), holes.end());
    std::vector<std::pair<double, double>> segments;
    double cursor = box.x0;
    for (const auto& [a, b] : holes) {
      if (a > cursor) segments.emplace_back(cursor, std::min(a, box.x1));
      cursor = std::max(cursor, b);
    }
    if (cursor < box.x1) segments.emplace_back(cursor, box.x1);

    const detail::RowAntiderivative anti(std::conj(w) + Complex(0.0, y), z - Complex(0.0, y), eps0);
    Complex sum(0.0, 0.0);
    for (const auto& [a, b] : segments) {
      if (!(b > a)) continue;
      detail::for_each_constant_piece(g, Curve{Complex(0.0, y), 1.0, false}, a, b, cfg, 2, evals,
                                      [&](double lo, double hi, double v) {
                                        if (v != 0.0) sum += v * (anti(hi) - anti(lo));
                                      });
    }
    return -sum / pi;
  };

  std::vector<double> ybreaks{box.y0, box.y1};
  for (Complex p : {z, w}) {
    for (double y : {p.imag() - eps0, p.imag(), p.imag() + eps0}) {
      if (y > box.y0 && y < box.y1) ybreaks.push_back(y);
    }
  }
  for (double y : detail::feature_heights(g)) {
    if (y > box.y0 && y < box.y1) ybreaks.push_back(y);
  }
  const auto outer = adaptive::integrate(row, ybreaks, 0.5 * cfg.target_tol, cfg.max_refinements);
  const auto near_z = detail::polar_annuli(g, z, w, true, radii, cfg, 0.1 * cfg.target_tol, evals);
  const auto near_w = detail::polar_annuli(g, z, w, false, radii, cfg, 0.1 * cfg.target_tol, evals);

  // Excised values Q(eps_k): everything outside the two discs of radius eps_k.
  const std::size_t K = radii.size() - 1;
  std::vector<Complex> excised(K + 1);
  excised[0] = outer.value;
  for (std::size_t k = 0; k < K; ++k) excised[k + 1] = excised[k] + near_z.values[k] + near_w.values[k];

  auto extrapolate = [&](std::size_t k) {  // linear in eps through (k-1, k)
    const double e1 = radii[k - 1], e2 = radii[k];
    return (e1 * excised[k] - e2 * excised[k - 1]) / (e1 - e2);
  };
  const Complex limit = extrapolate(K);
  const double extrapolation_error = std::abs(limit - extrapolate(K - 1));

  IntegralResult r;
  r.value = limit;
  r.error_estimate = outer.error + near_z.error + near_w.error + extrapolation_error;
  r.converged = outer.converged && near_z.converged && near_w.converged &&
                r.error_estimate <= cfg.target_tol;
  r.evaluations = evals;
  if (!r.converged) r.note = "planar refinement or extrapolation did not reach target_tol";
  return detail::unresolved(std::move(r), g, cfg);
}

}  // namespace cauchyvals

#pragma once

// Checks built on the two quadrature engines: E_g(z, w) with its diagonal
// convention, the inequality |1 - E| <= 1 and its equality case, membership
// of I_g in Omega_1, the support function of the value set {I_g}, and the
// boundary crossing along a convex path of densities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <valarray>
#include <vector>

#include "cauchyvals/adaptive.hpp"
#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/errors.hpp"
#include "cauchyvals/gfunction.hpp"
#include "cauchyvals/quadrature.hpp"

namespace cauchyvals {

enum class Engine { planar, cylinder, both };

inline const char* to_string(Engine e) noexcept {
  switch (e) {
    case Engine::planar: return "planar";
    case Engine::cylinder: return "cylinder";
    case Engine::both: return "both";
  }
  return "?";
}

/// C_g(z, w) by the selected route. The cylinder route integrates the affine
/// pullback of g; "both" runs the two routes and reports disagreement beyond
/// three times their combined error as non-convergence.
inline IntegralResult c_value(const GSpec& g, Complex z, Complex w, const QuadConfig& cfg = {},
                              Engine engine = Engine::planar) {
  if (z == w) throw DomainError("c_value: z = w; use diag_integral for the diagonal");
  switch (engine) {
    case Engine::planar: return planar_integrate(g, z, w, cfg);
    case Engine::cylinder: return cylinder_integrate(affine_pullback(g, z, w), cfg);
    case Engine::both: break;
  }
  const IntegralResult p = planar_integrate(g, z, w, cfg);
  const IntegralResult c = cylinder_integrate(affine_pullback(g, z, w), cfg);
  const double gap = std::abs(p.value - c.value);
  const double combined = p.error_estimate + c.error_estimate;
  IntegralResult r;
  r.value = p.value;
  r.error_estimate = std::max(combined, gap);
  r.evaluations = p.evaluations + c.evaluations;
  r.converged = p.converged && c.converged && gap <= 3.0 * combined;
  if (!p.note.empty()) r.note = "planar: " + p.note;
  if (!c.note.empty()) r.note += (r.note.empty() ? "" : "; ") + std::string("cylinder: ") + c.note;
  if (gap > 3.0 * combined) {
    r.note += (r.note.empty() ? "" : "; ") + std::string("engines disagree by ") + std::to_string(gap);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Diagonal

enum class DiagonalStatus { finite, divergent, inconclusive };

inline const char* to_string(DiagonalStatus s) noexcept {
  switch (s) {
    case DiagonalStatus::finite: return "finite";
    case DiagonalStatus::divergent: return "divergent";
    case DiagonalStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct DiagonalResult {
  DiagonalStatus status = DiagonalStatus::inconclusive;
  /// Extrapolated integral; NaN unless finite.
  double value = std::numeric_limits<double>::quiet_NaN();
  double error = 0.0;
  /// Fitted c in a + c ln(1/eps).
  double log_coefficient = 0.0;
  std::vector<double> radii;
  /// (1/pi) Int_{|u - w| > eps_k} g / |u - w|^2 for each radius.
  std::vector<double> evidence;
};

class InconclusiveDiagonal : public NumericalError {
 public:
  InconclusiveDiagonal(const std::string& what, std::vector<double> evidence)
      : NumericalError(what), evidence_(std::move(evidence)) {}
  const std::vector<double>& evidence() const noexcept { return evidence_; }

 private:
  std::vector<double> evidence_;
};

namespace detail {

/// Residual RMS and slope of the least-squares line y = a + b x.
inline std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double b = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + b * (x[i] - mx));
    ss += r * r;
  }
  return {std::sqrt(ss / n), b};
}

}  // namespace detail

/// Excised integrals (1/pi) Int_{|u - w| > eps_k} g(u) / |u - w|^2 da over the
/// excision radii of cfg (absolute radii here), classified as finite,
/// divergent (growth like c ln(1/eps)) or inconclusive.
inline DiagonalResult diag_integral(const GSpec& g, Complex w, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!is_finite(w)) throw DomainError("diag_integral: non-finite point");
  const std::vector<double>& radii = cfg.excision_radii;
  const std::size_t K = radii.size();
  const BoundingBox box = support_box(g);
  const double R = std::max(box.max_distance_from(w) * (1.0 + 1e-9), 2.0 * radii.front());

  std::size_t evals = 0;
  // Component 0: [eps_0, R]; component k >= 1: [eps_k, eps_{k-1}].
  auto integrand = [&](double phi) {
    const Complex dir = std::polar(1.0, phi);
    const Curve ray{w, dir, false};
    std::valarray<double> out(0.0, K);
    for (std::size_t k = 0; k < K; ++k) {
      const double lo = radii[k];
      const double hi = k == 0 ? R : radii[k - 1];
      double acc = 0.0;
      detail::for_each_constant_piece(g, ray, lo, hi, cfg, 2, evals,
                                      [&](double a, double b, double v) {
                                        if (v != 0.0) acc += v * std::log(b / a);
                                      });
      out[k] = acc / pi;
    }
    return out;
  };
  const auto est =
      adaptive::integrate(integrand, detail::polar_breaks(g, w), cfg.target_tol, cfg.max_refinements);

  DiagonalResult d;
  d.radii = radii;
  d.evidence.resize(K);
  double running = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    running += est.value[k];
    d.evidence[k] = running;
  }

  std::vector<double> xs(K), ls(K);
  for (std::size_t k = 0; k < K; ++k) {
    xs[k] = radii[k];
    ls[k] = std::log(1.0 / radii[k]);
  }
  const auto [res_lin, slope_lin] = detail::line_fit(xs, d.evidence);
  const auto [res_log, slope_log] = detail::line_fit(ls, d.evidence);
  (void)slope_lin;
  d.log_coefficient = slope_log;

  const double last = d.evidence[K - 1];
  const double noise = 10.0 * est.error + 1e-12 * (1.0 + std::abs(last));
  std::vector<double> diffs;
  for (std::size_t k = 1; k < K; ++k) diffs.push_back(d.evidence[k] - d.evidence[k - 1]);

  if (slope_log > cfg.divergence_threshold && 10.0 * res_log <= res_lin) {
    d.status = DiagonalStatus::divergent;
    d.error = est.error;
    return d;
  }
  bool decaying = diffs.size() >= 4;
  for (std::size_t i = diffs.size() >= 4 ? diffs.size() - 4 : 0; i + 1 < diffs.size(); ++i) {
    if (!(std::abs(diffs[i + 1]) <= 0.75 * std::abs(diffs[i]) + noise)) decaying = false;
  }
  if (res_lin <= noise || decaying) {
    // Linear extrapolation to eps = 0 through the last two radii.
    const double e1 = radii[K - 2], e2 = radii[K - 1];
    d.value = (e1 * d.evidence[K - 1] - e2 * d.evidence[K - 2]) / (e1 - e2);
    d.error = est.error + std::abs(diffs.back());
    d.status = DiagonalStatus::finite;
    return d;
  }
  d.status = DiagonalStatus::inconclusive;
  d.error = est.error;
  return d;
}

// ---------------------------------------------------------------------------
// E and the inequality

struct EValue {
  Complex value{0.0, 0.0};
  double error = 0.0;
  bool converged = true;
  /// C_g(z, w); on the diagonal -V, or -infinity when the integral diverges.
  IntegralResult c;
  std::optional<DiagonalResult> diagonal;
};

/// E_g(z, w) = exp C_g(z, w); on the diagonal 0 when the integral diverges and
/// exp(-V) when it is finite.
inline EValue e_value(const GSpec& g, Complex z, Complex w, const QuadConfig& cfg = {},
                      Engine engine = Engine::planar) {
  EValue out;
  if (z != w) {
    out.c = c_value(g, z, w, cfg, engine);
    out.value = std::exp(out.c.value);
    out.error = std::abs(out.value) * out.c.error_estimate;
    out.converged = out.c.converged;
    return out;
  }
  DiagonalResult d = diag_integral(g, w, cfg);
  switch (d.status) {
    case DiagonalStatus::divergent:
      out.c.value = Complex(-std::numeric_limits<double>::infinity(), 0.0);
      out.value = 0.0;
      break;
    case DiagonalStatus::finite:
      out.c.value = Complex(-d.value, 0.0);
      out.c.error_estimate = d.error;
      out.value = std::exp(-d.value);
      out.error = std::abs(out.value) * d.error;
      break;
    case DiagonalStatus::inconclusive: {
      std::string msg = "e_value: diagonal integral is neither finite nor divergent; evidence:";
      for (double v : d.evidence) msg += " " + std::to_string(v);
      throw InconclusiveDiagonal(msg, d.evidence);
    }
  }
  out.c.converged = true;
  out.converged = true;
  out.diagonal = std::move(d);
  return out;
}

enum class Classification { strict_interior, boundary_extremal, violation };

inline const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::strict_interior: return "strict_interior";
    case Classification::boundary_extremal: return "boundary_extremal";
    case Classification::violation: return "violation";
  }
  return "?";
}

struct VerifyOptions {
  /// |gap| below max(equality_tol, 3 error) counts as equality.
  double equality_tol = 1e-6;
  /// Cells per side of the grid used to compare g with the matched disc.
  int match_grid = 200;
  double match_fraction = 0.99;
};

struct InequalityVerdict {
  Complex c_value;
  double c_error = 0.0;
  Complex e_value;
  double e_error = 0.0;
  double gap = 0.0;
  Classification classification = Classification::strict_interior;
  std::optional<double> matched_theta;
  /// Fraction of grid cells where g equals the matched disc indicator.
  double match_agreement = 0.0;
  bool converged = true;
  bool diagonal = false;
  /// Set on the diagonal.
  std::optional<DiagonalResult> diagonal_result;
  /// Non-convergence diagnostics of the integral, if any.
  std::string note;
  /// The underlying C_g(z, w) integral.
  IntegralResult integral;
};

/// The disc 1/2 ((z - w) D_theta + (z + w)).
inline GSpec transformed_disc(ThetaAngle theta, Complex z, Complex w) {
  const CircleTheta c = circle_for_theta(theta);
  return GSpec::disc(0.5 * ((z - w) * c.center + (z + w)), 0.5 * std::abs(z - w) * c.radius);
}

/// Fraction of an n x n grid of cell centers, over the union of both support
/// boxes, where a and b take the same value.
inline double pointwise_agreement(const GSpec& a, const GSpec& b, int n) {
  if (n < 1) throw DomainError("pointwise_agreement: grid must have at least one cell");
  const BoundingBox box = unite(support_box(a), support_box(b));
  std::size_t same = 0;
  for (int j = 0; j < n; ++j) {
    const double y = box.y0 + (j + 0.5) * box.height() / n;
    for (int i = 0; i < n; ++i) {
      const Complex u(box.x0 + (i + 0.5) * box.width() / n, y);
      if (std::abs(evaluate(a, u) - evaluate(b, u)) < 1e-12) ++same;
    }
  }
  return static_cast<double>(same) / (static_cast<double>(n) * n);
}

inline InequalityVerdict verify_inequality(const GSpec& g, Complex z, Complex w,
                                           const QuadConfig& cfg = {},
                                           Engine engine = Engine::planar,
                                           const VerifyOptions& opt = {}) {
  const EValue e = e_value(g, z, w, cfg, engine);
  InequalityVerdict v;
  v.c_value = e.c.value;
  v.c_error = e.c.error_estimate;
  v.e_value = e.value;
  v.e_error = e.error;
  v.gap = 1.0 - std::abs(1.0 - e.value);
  v.converged = e.converged;
  v.diagonal = z == w;
  v.diagonal_result = e.diagonal;
  v.note = e.c.note;
  v.integral = e.c;

  const double band = std::max(opt.equality_tol, 3.0 * v.e_error);
  if (v.gap < -3.0 * v.e_error && v.gap < -opt.equality_tol) {
    v.classification = Classification::violation;
  } else if (std::abs(v.gap) <= band) {
    v.classification = Classification::boundary_extremal;
  } else {
    v.classification = Classification::strict_interior;
  }

  if (v.classification == Classification::boundary_extremal && !v.diagonal) {
    const double theta = 0.5 * pi - v.c_value.imag();
    if (theta > 0.0 && theta < pi) {
      const ThetaAngle th(theta);
      const double tol = std::max(opt.equality_tol, 3.0 * v.c_error);
      if (std::abs(v.c_value - i_theta(th)) <= tol) {
        v.match_agreement = pointwise_agreement(g, transformed_disc(th, z, w), opt.match_grid);
        if (v.match_agreement >= opt.match_fraction) v.matched_theta = theta;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Omega_1, strip bounds

struct Omega1Report {
  Omega1Location location;
  /// |exp(I_g) - 1|.
  double proxy;
  double tol;
  IntegralResult integral;
};

/// Locates I_g relative to Omega_1; the boundary band is widened by the
/// propagated engine error.
inline Omega1Report omega1_locate(const GSpec& g, const QuadConfig& cfg = {}) {
  const IntegralResult I = cylinder_integrate(g, cfg);
  if (!I.converged) throw NumericalError("omega1_locate: I_g did not converge: " + I.note);
  const double tol = 1e-9 + 3.0 * std::abs(std::exp(I.value)) * I.error_estimate;
  return {omega1_membership(I.value, tol), omega1_distance_proxy(I.value), tol, I};
}

struct StripCheck {
  IntegralResult integral;
  bool passes;
  /// ln 2 - Re I_g and pi/2 - |Im I_g|; negative means outside.
  double re_slack;
  double im_slack;
};

/// Re I_g <= ln 2 and |Im I_g| <= pi/2, each up to the engine error.
inline StripCheck strip_bounds_check(const GSpec& g, const QuadConfig& cfg = {}) {
  const IntegralResult I = cylinder_integrate(g, cfg);
  const double re_slack = ln2 - I.value.real();
  const double im_slack = 0.5 * pi - std::abs(I.value.imag());
  const double err = I.error_estimate + 1e-12;
  return {I, re_slack >= -err && im_slack >= -err, re_slack, im_slack};
}

// ---------------------------------------------------------------------------
// Support function

struct SupportResult {
  double alpha;
  double theta_star;
  /// Re(e^{-i alpha} I_{theta*}).
  double support_value;
  GSpec extremal_gspec;
  int grid;
  /// Fraction of cylinder cells where the bang-bang set equals g_{theta*} o u.
  double agreement;
  /// Re(e^{-i alpha} I_g) for the bang-bang set, by subcell midpoints.
  double achieved_value;
};

/// Maximizes Re(e^{-i alpha} I_g) over densities 0 <= g <= 1. The maximizer
/// is the indicator of the set where the real part of e^{-i alpha} times the
/// cylinder coefficient is positive; it is compared against D_{pi/2 - alpha}
/// on an n x n grid of cylinder cells.
inline SupportResult support_function(double alpha, int grid = 400, int subcells = 4) {
  if (!std::isfinite(alpha) || !(std::abs(alpha) < 0.5 * pi)) {
    throw DomainError("support_function: |alpha| >= pi/2 is an unsupported direction");
  }
  if (grid < 1 || subcells < 1) throw DomainError("support_function: grid sizes must be positive");
  const ThetaAngle theta_star(0.5 * pi - alpha);
  const Complex rot = std::polar(1.0, -alpha);
  const GSpec disc = g_theta(theta_star);

  const double dt = 2.0 * pi / grid;
  const double dth = pi / grid;
  std::size_t agree = 0;
  double achieved = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double theta = (i + 0.5) * dth;
    double row = 0.0;
    for (int j = 0; j < grid; ++j) {
      const double t = -pi + (j + 0.5) * dt;
      if (zero_set_factor(t, theta) != 0.0) {
        const bool bang = (rot * cylinder_coefficient(t, theta)).real() > 0.0;
        const bool ref = evaluate(disc, map_u(t, theta)) > 0.0;
        if (bang == ref) ++agree;
      }
      for (int a = 0; a < subcells; ++a) {
        const double th = i * dth + (a + 0.5) * dth / subcells;
        for (int b = 0; b < subcells; ++b) {
          const double tt = -pi + j * dt + (b + 0.5) * dt / subcells;
          if (zero_set_factor(tt, th) == 0.0) continue;
          row += std::max(0.0, (rot * cylinder_coefficient(tt, th)).real());
        }
      }
    }
    achieved += row;
  }
  achieved *= dt * dth / (subcells * subcells);

  SupportResult r{alpha,
                  theta_star.value(),
                  (rot * i_theta(theta_star)).real(),
                  disc,
                  grid,
                  static_cast<double>(agree) / (static_cast<double>(grid) * grid),
                  achieved};
  return r;
}

// ---------------------------------------------------------------------------
// Boundary crossing

/// Smallest lambda in [0, 1] where |exp((1 - lambda) p + lambda q) - 1| = 1,
/// located by a 1000-point scan for the first sign change and bisection to 1e-12.
inline double boundary_crossing(Complex p, Complex q) {
  auto f = [&](double lambda) {
    return omega1_distance_proxy((1.0 - lambda) * p + lambda * q) - 1.0;
  };
  constexpr double on_curve = 1e-12;
  const double f0 = f(0.0);
  if (std::abs(f0) <= on_curve) return 0.0;
  constexpr int steps = 1000;
  double lo = 0.0, flo = f0;
  for (int k = 1; k <= steps; ++k) {
    const double hi = static_cast<double>(k) / steps;
    const double fhi = f(hi);
    if (std::abs(fhi) <= on_curve) return hi;
    if ((flo < 0.0) != (fhi < 0.0)) {
      double a = lo, b = hi;
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0.0) == (flo < 0.0)) {
          a = m;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw DomainError("boundary_crossing: |exp(z) - 1| - 1 has no sign change on the segment");
}

// ---------------------------------------------------------------------------
// Randomized corpus

struct RandomInstance {
  std::string kind;
  GSpec g;
  Complex z;
  Complex w;
  /// Set for the "extremal_disc" kind.
  std::optional<double> theta;
};

/// One random density and pair: a union of discs, a raster with values in
/// [0, 1], a scaled disc, or (rarely) an exact transformed disc.
inline RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };
  auto point = [&] { return Complex(uniform(-1.5, 1.5), uniform(-1.5, 1.5)); };

  Complex z = point(), w = point();
  while (std::abs(z - w) <= 0.2) w = point();

  const double pick = unit(rng);
  if (pick < 0.3) {
    const int count = 1 + static_cast<int>(unit(rng) * 3.0);
    GSpec g = GSpec::disc(point(), uniform(0.2, 1.2));
    for (int k = 1; k < count; ++k) g = GSpec::unite(g, GSpec::disc(point(), uniform(0.2, 1.2)));
    return {"disc_union", g, z, w, std::nullopt};
  }
  if (pick < 0.6) {
    const double cell = uniform(0.15, 0.4);
    const int width = 3 + static_cast<int>(unit(rng) * 6.0);
    const int height = 3 + static_cast<int>(unit(rng) * 6.0);
    std::vector<double> values(static_cast<std::size_t>(width * height));
    for (auto& v : values) v = unit(rng) < 0.25 ? 0.0 : unit(rng);
    const Complex origin(uniform(-1.5, 0.5), uniform(-1.5, 0.5));
    return {"raster", GSpec::raster(origin, cell, width, height, std::move(values)), z, w,
            std::nullopt};
  }
  if (pick < 0.9) {
    const double factor = uniform(0.1, 1.0);
    return {"scaled_disc", GSpec::scale(factor, GSpec::disc(point(), uniform(0.2, 1.2))), z, w,
            std::nullopt};
  }
  const double theta = uniform(0.2, pi - 0.2);
  return {"extremal_disc", transformed_disc(ThetaAngle(theta), z, w), z, w, theta};
}

inline std::vector<RandomInstance> random_corpus(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<RandomInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_instance(rng));
  return out;
}

}  // namespace cauchyvals

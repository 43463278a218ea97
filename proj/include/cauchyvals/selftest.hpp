#pragma once

// The invariant suite behind `cauchyvals selftest`. Every suite is a list of
// named checks; results depend only on the seed and the instance count, never
// on the number of threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cauchyvals/analysis.hpp"
#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/gfunction.hpp"
#include "cauchyvals/io.hpp"
#include "cauchyvals/operator_model.hpp"
#include "cauchyvals/parallel.hpp"
#include "cauchyvals/quadrature.hpp"

namespace cauchyvals::selftest {

struct SuiteResult {
  SuiteResult() = default;
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  /// Largest observed value of the suite's headline error metric.
  double worst = 0.0;
  std::vector<std::string> failed;  // names of the first few failed checks

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      if (failed.size() < 5) failed.push_back(what);
    }
  }
  void observe(double v) {
    if (std::isnan(v) || v > worst) worst = v;
  }
  bool passed() const { return failures == 0; }
};

struct Options {
  std::uint64_t seed = 7;
  /// Randomized instances for the inequality suite.
  std::size_t count = 200;
  unsigned threads = 0;
  QuadConfig quad;
};

namespace detail {

inline std::string label(const char* what, double x) { return std::string(what) + "=" + io::format_number(x); }

inline std::vector<std::pair<std::string, GSpec>> engine_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto raster = [&](Complex origin, double cell, int n) {
    std::vector<double> v(static_cast<std::size_t>(n * n));
    for (auto& x : v) x = unit(rng) < 0.3 ? 0.0 : unit(rng);
    return GSpec::raster(origin, cell, n, n, std::move(v));
  };
  return {
      {"unit_disc", g_theta(ThetaAngle(0.5 * pi))},
      {"disc_theta_pi_3", g_theta(ThetaAngle(pi / 3))},
      {"offset_disc", GSpec::disc({0.3, 0.4}, 0.5)},
      {"disc_over_pole", GSpec::disc({1.1, -0.2}, 0.6)},
      {"annulus", annulus({0.0, 0.0}, 0.5, 1.5)},
      {"scaled_disc", GSpec::scale(0.6, GSpec::disc({-0.2, 0.5}, 0.8))},
      {"half_disc", GSpec::intersect(g_theta(ThetaAngle(0.5 * pi)), GSpec::rect(-1, 1, 0, 1))},
      {"rect", GSpec::rect(-0.5, 0.6, 0.3, 1.1)},
      {"raster_a", raster({-1.3, -0.9}, 0.35, 7)},
      {"raster_b", raster({-0.4, -1.4}, 0.25, 9)},
      {"union", GSpec::unite(GSpec::disc({-1.0, 0.5}, 0.4), GSpec::disc({0.8, -0.6}, 0.7))},
  };
}

}  // namespace detail

inline SuiteResult closed_form(const Options& o) {
  SuiteResult s{"closed_form"};
  for (double th : {pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}) {
    const IntegralResult r = cylinder_integrate(g_theta(ThetaAngle(th)), o.quad);
    const double err = std::abs(r.value - i_theta(ThetaAngle(th)));
    s.observe(err);
    s.check(r.converged && err <= 1e-6, detail::label("theta", th));
  }
  return s;
}

inline SuiteResult conjugation(const Options& o) {
  SuiteResult s{"conjugation_symmetry"};
  for (int k = 1; k <= 10; ++k) {
    const double th = k * pi / 22.0;
    const IntegralResult a = cylinder_integrate(g_theta(ThetaAngle(th)), o.quad);
    const IntegralResult b = cylinder_integrate(g_theta(ThetaAngle(pi - th)), o.quad);
    const double d = std::abs(b.value - std::conj(a.value));
    s.observe(d);
    s.check(d <= 2.0 * (a.error_estimate + b.error_estimate) + 1e-14, detail::label("theta", th));
  }
  return s;
}

inline SuiteResult engine_agreement(const Options& o) {
  SuiteResult s{"engine_agreement"};
  const auto corpus = detail::engine_corpus(o.seed);
  const auto rows = parallel_map(corpus.size(), o.threads, [&](std::size_t i) {
    const IntegralResult p = planar_integrate(corpus[i].second, 1.0, -1.0, o.quad);
    const IntegralResult c = cylinder_integrate(corpus[i].second, o.quad);
    return std::pair{p, c};
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [p, c] = rows[i];
    const double d = std::abs(p.value - c.value);
    s.observe(d);
    s.check(p.converged && c.converged && d <= 3.0 * (p.error_estimate + c.error_estimate) &&
                d <= 1e-3,
            corpus[i].first);
  }
  return s;
}

inline SuiteResult affine_reduction(const Options& o) {
  SuiteResult s{"affine_reduction"};
  const auto corpus = random_corpus(o.seed + 1, 20);
  const auto diffs = parallel_map(corpus.size(), o.threads, [&](std::size_t i) {
    const auto& in = corpus[i];
    const IntegralResult p = planar_integrate(in.g, in.z, in.w, o.quad);
    const IntegralResult c = cylinder_integrate(affine_pullback(in.g, in.z, in.w), o.quad);
    return std::abs(p.value - c.value);
  });
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    s.observe(diffs[i]);
    s.check(diffs[i] <= 1e-3, "instance " + std::to_string(i));
  }
  return s;
}

/// Inequality, equality characterization and strip bounds over one corpus.
inline std::vector<SuiteResult> randomized(const Options& o) {
  SuiteResult ineq{"inequality"}, eq{"equality_characterization"}, strip{"strip_bounds"};
  const auto corpus = random_corpus(o.seed, o.count);
  const auto verdicts = parallel_map(corpus.size(), o.threads, [&](std::size_t i) {
    return verify_inequality(corpus[i].g, corpus[i].z, corpus[i].w, o.quad);
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& v = verdicts[i];
    const std::string name = corpus[i].kind + " " + std::to_string(i);
    ineq.observe(-(v.gap + 3.0 * v.e_error));
    ineq.check(v.converged && v.gap >= -3.0 * v.e_error &&
                   v.classification != Classification::violation,
               name);
    if (v.classification == Classification::boundary_extremal) {
      eq.check(v.matched_theta.has_value(), name + " boundary without match");
    }
    if (corpus[i].theta) {
      const bool ok = v.classification == Classification::boundary_extremal && v.matched_theta &&
                      std::abs(*v.matched_theta - *corpus[i].theta) <= 1e-6;
      eq.check(ok, name + " extremal disc not recognized");
    }
    const double err = v.c_error + 1e-12;
    strip.check(v.c_value.real() <= ln2 + err && std::abs(v.c_value.imag()) <= 0.5 * pi + err, name);
  }
  return {ineq, eq, strip};
}

inline SuiteResult linearity_convexity(const Options& o) {
  SuiteResult s{"linearity_convexity"};
  const GSpec base = GSpec::unite(GSpec::disc({0.2, 0.3}, 0.6), GSpec::rect(-1.2, -0.2, -0.8, 0.1));
  const Complex z(0.7, 0.2), w(-0.6, -0.3);
  const IntegralResult c0 = c_value(base, z, w, o.quad);
  for (double sc : {0.25, 0.5, 0.9}) {
    const IntegralResult c = c_value(GSpec::scale(sc, base), z, w, o.quad);
    const double d = std::abs(c.value - sc * c0.value);
    s.observe(d);
    s.check(d <= 3.0 * (c.error_estimate + sc * c0.error_estimate) + 1e-12, detail::label("scale", sc));
  }
  const IntegralResult i0 = cylinder_integrate(base, o.quad);
  for (double lam : {0.0, 0.3, 0.7, 1.0}) {
    const IntegralResult c = cylinder_integrate(convex_path(base, lam), o.quad);
    const Complex expect = (1.0 - lam) * i0.value + lam * ln2;
    const double d = std::abs(c.value - expect);
    s.observe(d);
    s.check(d <= 3.0 * (c.error_estimate + i0.error_estimate) + 1e-12, detail::label("lambda", lam));
  }
  return s;
}

inline SuiteResult omega1(const Options& o) {
  SuiteResult s{"omega1_membership"};
  s.check(omega1_locate(zero_density(), o.quad).location == Omega1Location::interior, "zero");
  for (double th : {pi / 4, pi / 2, 2 * pi / 3}) {
    s.check(omega1_locate(g_theta(ThetaAngle(th)), o.quad).location == Omega1Location::boundary,
            detail::label("disc theta", th));
  }
  const GSpec unit = g_theta(ThetaAngle(0.5 * pi));
  const std::vector<std::pair<std::string, GSpec>> inside = {
      {"half_disc", GSpec::intersect(unit, GSpec::rect(-1, 1, 0, 1))},
      {"disc_with_hole", GSpec::intersect(unit, GSpec::complement_in(BoundingBox(-1, 1, -1, 1),
                                                                     GSpec::disc({0.0, 0.0}, 0.4)))},
      {"scaled_disc", GSpec::scale(0.9, unit)},
  };
  for (const auto& [name, g] : inside) {
    const Omega1Report r = omega1_locate(g, o.quad);
    s.observe(r.proxy);
    s.check(r.location == Omega1Location::interior, name);
  }
  for (int n : {2, 3, 17}) {
    for (const auto& b : omega1_boundary_samples(n)) {
      s.check(std::abs(omega1_distance_proxy(b.value) - 1.0) <= 1e-12, detail::label("curve", b.theta));
    }
  }
  return s;
}

inline SuiteResult diagonal(const Options& o) {
  SuiteResult s{"diagonal_conventions"};
  const GSpec unit = GSpec::disc({0.0, 0.0}, 1.0);
  const DiagonalResult ann = diag_integral(annulus({0.0, 0.0}, 1.0, 2.0), 0.0, o.quad);
  s.observe(std::abs(ann.value - 2.0 * ln2));
  s.check(ann.status == DiagonalStatus::finite && std::abs(ann.value - 2.0 * ln2) <= 1e-6, "annulus");
  s.check(diag_integral(zero_density(), {0.3, 0.1}, o.quad).status == DiagonalStatus::finite, "zero");
  const TruncatedShift T(400);
  for (Complex w : {Complex(0.0, 0.0), Complex(0.5, 0.2), Complex(-0.3, -0.7), Complex(0.85, 0.0)}) {
    const bool divergent = diag_integral(unit, w, o.quad).status == DiagonalStatus::divergent;
    const double e = std::abs(e_operator(T, w, w));
    s.observe(e);
    s.check(divergent && e <= 1e-2, "w=" + io::format_number(w.real()) + "," + io::format_number(w.imag()));
  }
  return s;
}

inline SuiteResult operator_model(const Options& o) {
  SuiteResult s{"operator_model"};
  const TruncatedShift T(400);
  std::vector<Complex> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(0.8 * (k / 4.0) * std::polar(1.0, 2.0 * pi * k / 5.0));
  const GSpec unit = g_theta(ThetaAngle(0.5 * pi));
  const auto diffs = parallel_map(pts.size() * pts.size(), o.threads, [&](std::size_t idx) {
    const Complex z = pts[idx / pts.size()], w = pts[idx % pts.size()];
    const Complex eop = e_operator(T, z, w);
    const Complex eint = e_value(unit, z, w, o.quad).value;
    const double herm = std::abs(eop - std::conj(e_operator(T, w, z)));
    return std::pair{std::abs(eop - eint), herm};
  });
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    s.observe(diffs[i].first);
    s.check(diffs[i].first <= 1e-3 && diffs[i].second <= 1e-12, "pair " + std::to_string(i));
  }
  for (Complex l : pts) {
    const ResolventVector x = global_local_resolvent(T, l);
    s.check(x.norm() <= 1.0 + 1e-6, "norm " + io::format_number(std::abs(l)));
  }
  return s;
}

inline SuiteResult geometry(const Options& o) {
  SuiteResult s{"cylinder_geometry"};
  std::mt19937_64 rng(o.seed + 2);
  std::uniform_real_distribution<double> ut(-pi, pi), uth(0.05, pi - 0.05), ux(-3.0, 3.0);
  double worst_jac = 0.0, worst_kernel = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = ut(rng), th = uth(rng);
    if (std::abs(zero_set_factor(t, th)) < 1e-3) continue;
    const double h = 1e-6;
    const Complex dt = (map_u(t + h, th) - map_u(t - h, th)) / (2.0 * h);
    const Complex dth = (map_u(t, th + h) - map_u(t, th - h)) / (2.0 * h);
    const double det = std::abs(dt.real() * dth.imag() - dt.imag() * dth.real());
    const double jac = jacobian(t, th);
    worst_jac = std::max(worst_jac, std::abs(det - jac) / jac);
    const Complex k = kernel(map_u(t, th));
    worst_kernel = std::max(worst_kernel, std::abs(parametrized_kernel(t, th) - k) / std::abs(k));
    const Complex prod = parametrized_kernel(t, th) * jac;
    worst_kernel = std::max(worst_kernel,
                            std::abs(prod - cylinder_coefficient(t, th)) / std::abs(prod));
    const Complex u(ux(rng), ux(rng));
    if (std::abs(u.imag()) > 1e-3 && std::abs(std::abs(u) - 1.0) > 1e-3) {
      const Complex ku = kernel(u);
      worst_kernel = std::max(worst_kernel, std::abs(kernel_on_circle(u) - ku) / std::abs(ku));
    }
    const Complex v = std::polar(1.0, ut(rng));
    if (std::abs(v.imag()) > 1e-3) {
      const Complex kv = kernel(v);
      worst_kernel = std::max(worst_kernel, std::abs(kernel_on_unit_circle(v) - kv) / std::abs(kv));
    }
  }
  s.observe(std::max(worst_jac, worst_kernel));
  s.check(worst_jac <= 1e-6, "jacobian");
  s.check(worst_kernel <= 1e-10, "kernel identities");

  const TriangleAreas areas = cylinder_region_areas(o.quad);
  s.check(std::abs(areas.upper - pi * pi) <= 1e-6 && std::abs(areas.lower - pi * pi) <= 1e-6,
          "triangle areas");
  for (double phi : {pi / 6, pi / 4, pi / 3}) {
    const IntegralResult r = region_iterated_integral(ThetaAngle(phi), o.quad);
    s.check(std::abs(r.value - i_theta(ThetaAngle(phi))) <= 1e-6, detail::label("regions phi", phi));
  }
  const auto m = lemma1_mass_refinements(GSpec::disc({0.0, 0.0}, 2.0), o.quad, 6);
  for (std::size_t k = 2; k < m.size(); ++k) {
    const double prev = std::abs(m[k - 1] - m[k - 2]), cur = std::abs(m[k] - m[k - 1]);
    s.check(cur * 1.5 <= prev, "mass refinement level " + std::to_string(k));
  }
  return s;
}

inline SuiteResult support(const Options&) {
  SuiteResult s{"support_function"};
  for (double a : {-1.2, -0.6, 0.0, 0.6, 1.2}) {
    const SupportResult r = support_function(a);
    const double d = std::abs(r.achieved_value - r.support_value);
    s.observe(d);
    s.check(r.agreement >= 0.995 && d <= 1e-2, detail::label("alpha", a));
  }
  return s;
}

inline SuiteResult crossing(const Options&) {
  SuiteResult s{"boundary_crossing"};
  s.check(boundary_crossing(ln2, ln2) == 0.0, "on curve");
  s.check(std::abs(boundary_crossing(0.0, 1.2) - ln2 / 1.2) <= 1e-10, "real axis");
  const Complex p(0.8, 0.8);
  const double l = boundary_crossing(p, 0.0);
  s.check(std::abs(omega1_distance_proxy((1.0 - l) * p) - 1.0) <= 1e-10, "bisection residual");
  return s;
}

inline std::vector<SuiteResult> run_all(const Options& o) {
  std::vector<SuiteResult> out;
  out.push_back(closed_form(o));
  out.push_back(conjugation(o));
  out.push_back(engine_agreement(o));
  out.push_back(affine_reduction(o));
  for (auto& r : randomized(o)) out.push_back(std::move(r));
  out.push_back(linearity_convexity(o));
  out.push_back(omega1(o));
  out.push_back(diagonal(o));
  out.push_back(operator_model(o));
  out.push_back(geometry(o));
  out.push_back(support(o));
  out.push_back(crossing(o));
  return out;
}

inline io::json report_json(const Options& o, const std::vector<SuiteResult>& suites) {
  io::json list = io::json::array();
  std::size_t passed = 0;
  for (const auto& s : suites) {
    if (s.passed()) ++passed;
    list.push_back({{"name", s.name},
                    {"passed", s.passed()},
                    {"checks", s.checks},
                    {"failures", s.failures},
                    {"worst", io::number(s.worst)},
                    {"failed", s.failed}});
  }
  return {{"seed", o.seed},
          {"count", o.count},
          {"suites", list},
          {"suites_passed", passed},
          {"suites_failed", suites.size() - passed}};
}

}  // namespace cauchyvals::selftest

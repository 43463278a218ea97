#pragma once

// Global adaptive Gauss-Kronrod (7/15) integration on an interval, plus a
// scanner that splits a line into the constant pieces of a piecewise-constant
// function. Both are deterministic: the refinement order depends only on the
// panel errors and positions, and final sums run left to right.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <valarray>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cauchyvals::adaptive {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
inline double magnitude(const std::valarray<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
inline double magnitude(const std::valarray<std::complex<double>>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class V>
struct Estimate {
  V value;
  double error = 0.0;
  bool converged = false;
  std::size_t panels = 0;
  std::size_t evaluations = 0;  // integrand calls
};

template <class V>
struct PanelRule {
  V kronrod;
  double error;
};

/// 15-point Kronrod value on [a, b] with |K15 - G7| as its error.
template <class F>
auto gauss_kronrod_15(F& f, double a, double b) {
  using V = std::decay_t<std::invoke_result_t<F&, double>>;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  V center = f(mid);
  V kron = center * wk[0];
  V gauss = center * wg[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    V sum = f(mid - dx) + f(mid + dx);
    kron += sum * wk[i];
    if (i % 2 == 0) gauss += sum * wg[i / 2];
  }
  kron *= half;
  gauss *= half;
  const double err = magnitude(V(kron - gauss));
  return PanelRule<V>{kron, err};
}

/// Integrates f over the union of [breaks[i], breaks[i+1]] by repeatedly
/// bisecting the panel with the largest error estimate until the summed error
/// is at most abs_tol or max_subdivisions bisections have been spent.
template <class F>
auto integrate(F&& f, std::vector<double> breaks, double abs_tol, std::size_t max_subdivisions) {
  using V = std::decay_t<std::invoke_result_t<F&, double>>;
  struct Panel {
    double a, b;
    V value;
    double error;
  };

  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<Panel> panels;
  std::size_t evaluations = 0;
  auto eval_panel = [&](double a, double b) {
    auto rule = gauss_kronrod_15(f, a, b);
    evaluations += 15;
    return Panel{a, b, rule.kronrod, rule.error};
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    panels.push_back(eval_panel(breaks[i], breaks[i + 1]));
  }

  // Heap of panel indices ordered by error, ties broken by position.
  auto worse = [&](std::size_t i, std::size_t j) {
    if (panels[i].error != panels[j].error) return panels[i].error < panels[j].error;
    return panels[i].a > panels[j].a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
  double total_error = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    heap.push(i);
    total_error += panels[i].error;
  }

  std::size_t subdivisions = 0;
  while (total_error > abs_tol && subdivisions < max_subdivisions && !heap.empty()) {
    const std::size_t i = heap.top();
    heap.pop();
    const double a = panels[i].a, b = panels[i].b;
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b) || (b - a) < 1e-15 * std::max(1.0, std::abs(a))) {
      continue;  // too narrow to split further; keep its error as is
    }
    total_error -= panels[i].error;
    Panel left = eval_panel(a, mid);
    Panel right = eval_panel(mid, b);
    total_error += left.error + right.error;
    panels[i] = std::move(left);
    panels.push_back(std::move(right));
    heap.push(i);
    heap.push(panels.size() - 1);
    ++subdivisions;
    if (total_error <= abs_tol) {
      double exact = 0.0;
      for (const auto& p : panels) exact += p.error;
      total_error = exact;
    }
  }

  std::sort(panels.begin(), panels.end(),
            [](const Panel& p, const Panel& q) { return p.a < q.a; });
  Estimate<V> out;
  out.value = panels.front().value;
  out.error = panels.front().error;
  for (std::size_t i = 1; i < panels.size(); ++i) {
    out.value += panels[i].value;
    out.error += panels[i].error;
  }
  out.converged = out.error <= abs_tol;
  out.panels = panels.size();
  out.evaluations = evaluations;
  return out;
}

/// Composite fixed rule: `panels_per_interval` equal Gauss-Kronrod panels in
/// each break interval, no adaptivity.
template <class F>
auto integrate_fixed(F&& f, std::vector<double> breaks, std::size_t panels_per_interval) {
  using V = std::decay_t<std::invoke_result_t<F&, double>>;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  Estimate<V> out;
  bool first = true;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double h = (breaks[i + 1] - breaks[i]) / static_cast<double>(panels_per_interval);
    for (std::size_t k = 0; k < panels_per_interval; ++k) {
      const double a = breaks[i] + h * static_cast<double>(k);
      const double b = (k + 1 == panels_per_interval) ? breaks[i + 1] : a + h;
      auto rule = gauss_kronrod_15(f, a, b);
      if (first) {
        out.value = rule.kronrod;
        first = false;
      } else {
        out.value += rule.kronrod;
      }
      out.error += rule.error;
      out.evaluations += 15;
      ++out.panels;
    }
  }
  out.converged = true;
  return out;
}

/// Splits [a, b] into maximal pieces on which value_at is constant and calls
/// emit(lo, hi, value) for each, left to right.
///
/// value_at is sampled just inside both endpoints and at `samples` - 1 evenly
/// spaced interior points; whenever two neighbouring samples differ, the jump
/// between them is located by bisection. Features narrower than the sample
/// spacing can be missed, so callers size `samples` from the geometric
/// feature scale of the density.
template <class F, class Emit>
void scan_constant_pieces(F&& value_at, double a, double b, std::size_t samples, Emit&& emit) {
  if (!(b > a)) return;
  samples = std::max<std::size_t>(samples, 1);
  const double len = b - a;
  const double xtol = 4.0 * std::numeric_limits<double>::epsilon() *
                      std::max({1.0, std::abs(a), std::abs(b)});
  const double inset = std::min(0.25 * len / static_cast<double>(samples), 64.0 * xtol);
  auto node = [&](std::size_t k) {
    if (k == 0) return a + inset;
    if (k == samples) return b - inset;
    return a + len * (static_cast<double>(k) / static_cast<double>(samples));
  };

  double start = a;
  double prev_x = node(0);
  double current = value_at(prev_x);
  for (std::size_t k = 1; k <= samples; ++k) {
    const double x = node(k);
    const double v = value_at(x);
    if (v == current) {
      prev_x = x;
      continue;
    }
    // Walk the transitions between prev_x (value current) and x (value v).
    double lo = prev_x;
    for (int guard = 0; guard < 64 && current != v; ++guard) {
      double hi = x;
      double hi_value = v;
      while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double vm = value_at(mid);
        if (vm == current) {
          lo = mid;
        } else {
          hi = mid;
          hi_value = vm;
        }
      }
      const double jump = 0.5 * (lo + hi);
      emit(start, jump, current);
      start = jump;
      current = hi_value;
      lo = hi;
    }
    current = v;
    prev_x = x;
  }
  emit(start, b, current);
}

}  // namespace cauchyvals::adaptive

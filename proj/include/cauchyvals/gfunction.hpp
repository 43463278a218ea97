#pragma once

// Densities 0 <= g <= 1 with compact support, described symbolically.
//
// A GSpec is an immutable expression tree. Every node evaluates into [0, 1]
// and carries a finite bounding box of its essential support, so every
// combination stays inside the admissible class. All primitives are piecewise
// constant, which the quadrature engines rely on when they locate jumps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/errors.hpp"

namespace cauchyvals {

struct BoundingBox {
  double x0, x1, y0, y1;

  BoundingBox(double x0_, double x1_, double y0_, double y1_)
      : x0(x0_), x1(x1_), y0(y0_), y1(y1_) {
    if (!(x0 < x1) || !(y0 < y1) || !std::isfinite(x0) || !std::isfinite(x1) ||
        !std::isfinite(y0) || !std::isfinite(y1)) {
      throw DomainError("BoundingBox requires finite x0 < x1 and y0 < y1");
    }
  }

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }

  bool contains(Complex u) const noexcept {
    return u.real() > x0 && u.real() < x1 && u.imag() > y0 && u.imag() < y1;
  }

  /// Largest distance from p to a point of the box.
  double max_distance_from(Complex p) const noexcept {
    const double dx = std::max(std::abs(x0 - p.real()), std::abs(x1 - p.real()));
    const double dy = std::max(std::abs(y0 - p.imag()), std::abs(y1 - p.imag()));
    return std::hypot(dx, dy);
  }

  friend BoundingBox unite(const BoundingBox& a, const BoundingBox& b) {
    return {std::min(a.x0, b.x0), std::max(a.x1, b.x1), std::min(a.y0, b.y0),
            std::max(a.y1, b.y1)};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

class GSpec;

namespace shape {

struct Disc {
  Complex center;
  double radius;
};

struct Rect {
  double x0, x1, y0, y1;
};

/// Indicator of the disc bounded by the circle through +-1 with angle theta.
struct DiscTheta {
  ThetaAngle theta;
  Complex center;
  double radius;
};

/// Cell (i, j) covers [ox + i c, ox + (i+1) c) x [oy + j c, oy + (j+1) c) and
/// holds values[j * width + i]; row j = 0 is the bottom row.
struct Raster {
  Complex origin;
  double cell_size;
  int width;
  int height;
  std::shared_ptr<const std::vector<double>> values;
};

struct Scale {
  double factor;
  std::shared_ptr<const GSpec> inner;
};

struct Union {
  std::shared_ptr<const GSpec> a, b;
};

struct Intersection {
  std::shared_ptr<const GSpec> a, b;
};

/// 1 - inner on the open box, 0 outside it.
struct ComplementInBox {
  BoundingBox box;
  std::shared_ptr<const GSpec> inner;
};

/// (1 - lambda) a + lambda b.
struct ConvexCombination {
  double lambda;
  std::shared_ptr<const GSpec> a, b;
};

/// v -> inner((z - w) v / 2 + (z + w) / 2); sends -1 to w and +1 to z.
struct AffinePullback {
  Complex z, w;
  std::shared_ptr<const GSpec> inner;
};

}  // namespace shape

using GNode = std::variant<shape::Disc, shape::Rect, shape::DiscTheta, shape::Raster,
                           shape::Scale, shape::Union, shape::Intersection,
                           shape::ComplementInBox, shape::ConvexCombination,
                           shape::AffinePullback>;

class GSpec {
 public:
  static GSpec disc(Complex center, double radius) {
    if (!is_finite(center) || !(radius > 0.0) || !std::isfinite(radius)) {
      throw DomainError("disc: finite center and positive radius required");
    }
    return GSpec(shape::Disc{center, radius});
  }

  static GSpec rect(double x0, double x1, double y0, double y1) {
    BoundingBox check(x0, x1, y0, y1);
    return GSpec(shape::Rect{check.x0, check.x1, check.y0, check.y1});
  }

  static GSpec disc_theta(ThetaAngle theta) {
    const CircleTheta c = circle_for_theta(theta);
    return GSpec(shape::DiscTheta{theta, c.center, c.radius});
  }

  static GSpec raster(Complex origin, double cell_size, int width, int height,
                      std::vector<double> values) {
    if (!is_finite(origin) || !(cell_size > 0.0) || !std::isfinite(cell_size)) {
      throw DomainError("raster: finite origin and positive cell size required");
    }
    if (width < 1 || height < 1) throw DomainError("raster: width and height must be >= 1");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw DomainError("raster: expected " + std::to_string(width * height) +
                        " values, got " + std::to_string(values.size()));
    }
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("raster: values must lie in [0, 1]");
    }
    return GSpec(shape::Raster{origin, cell_size, width, height,
                               std::make_shared<const std::vector<double>>(std::move(values))});
  }

  static GSpec scale(double factor, GSpec inner) {
    if (!(factor >= 0.0 && factor <= 1.0)) throw DomainError("scale: factor must lie in [0, 1]");
    return GSpec(shape::Scale{factor, share(std::move(inner))});
  }

  static GSpec unite(GSpec a, GSpec b) {
    return GSpec(shape::Union{share(std::move(a)), share(std::move(b))});
  }

  static GSpec intersect(GSpec a, GSpec b) {
    return GSpec(shape::Intersection{share(std::move(a)), share(std::move(b))});
  }

  static GSpec complement_in(BoundingBox box, GSpec inner) {
    return GSpec(shape::ComplementInBox{box, share(std::move(inner))});
  }

  static GSpec convex_combination(double lambda, GSpec a, GSpec b) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw DomainError("convex_combination: lambda must lie in [0, 1]");
    }
    return GSpec(shape::ConvexCombination{lambda, share(std::move(a)), share(std::move(b))});
  }

  static GSpec pullback(GSpec inner, Complex z, Complex w) {
    if (!is_finite(z) || !is_finite(w)) throw DomainError("pullback: non-finite endpoint");
    if (z == w) throw DomainError("pullback: z = w admits no affine normalization");
    return GSpec(shape::AffinePullback{z, w, share(std::move(inner))});
  }

  const GNode& node() const noexcept { return *node_; }

 private:
  explicit GSpec(GNode node) : node_(std::make_shared<const GNode>(std::move(node))) {}

  static std::shared_ptr<const GSpec> share(GSpec g) {
    return std::make_shared<const GSpec>(std::move(g));
  }

  std::shared_ptr<const GNode> node_;
};

/// The zero density.
inline GSpec zero_density() { return GSpec::scale(0.0, GSpec::disc({0.0, 0.0}, 1.0)); }

/// Indicator of r_in < |u - center| < r_out.
inline GSpec annulus(Complex center, double r_in, double r_out) {
  if (!(0.0 < r_in && r_in < r_out)) throw DomainError("annulus: need 0 < r_in < r_out");
  const BoundingBox box(center.real() - r_out, center.real() + r_out, center.imag() - r_out,
                        center.imag() + r_out);
  return GSpec::intersect(GSpec::disc(center, r_out),
                          GSpec::complement_in(box, GSpec::disc(center, r_in)));
}

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline Complex affine_image(Complex v, Complex z, Complex w) noexcept {
  return 0.5 * ((z - w) * v + (z + w));
}

inline Complex affine_preimage(Complex u, Complex z, Complex w) noexcept {
  return (2.0 * u - (z + w)) / (z - w);
}

}  // namespace detail

/// Pointwise value in [0, 1]. Disc-type indicators are 1 on the open disc only.
inline double evaluate(const GSpec& g, Complex u) {
  using namespace shape;
  return std::visit(
      detail::overloaded{
          [&](const Disc& d) { return std::norm(u - d.center) < d.radius * d.radius ? 1.0 : 0.0; },
          [&](const Rect& r) {
            return (u.real() > r.x0 && u.real() < r.x1 && u.imag() > r.y0 && u.imag() < r.y1)
                       ? 1.0
                       : 0.0;
          },
          [&](const DiscTheta& d) {
            return std::norm(u - d.center) < d.radius * d.radius ? 1.0 : 0.0;
          },
          [&](const Raster& r) {
            const double fx = std::floor((u.real() - r.origin.real()) / r.cell_size);
            const double fy = std::floor((u.imag() - r.origin.imag()) / r.cell_size);
            if (!(fx >= 0.0 && fx < r.width && fy >= 0.0 && fy < r.height)) return 0.0;
            const auto i = static_cast<std::size_t>(fx);
            const auto j = static_cast<std::size_t>(fy);
            return (*r.values)[j * static_cast<std::size_t>(r.width) + i];
          },
          [&](const Scale& s) { return s.factor == 0.0 ? 0.0 : s.factor * evaluate(*s.inner, u); },
          [&](const Union& c) { return std::max(evaluate(*c.a, u), evaluate(*c.b, u)); },
          [&](const Intersection& c) { return std::min(evaluate(*c.a, u), evaluate(*c.b, u)); },
          [&](const ComplementInBox& c) {
            return c.box.contains(u) ? 1.0 - evaluate(*c.inner, u) : 0.0;
          },
          [&](const ConvexCombination& c) {
            return (1.0 - c.lambda) * evaluate(*c.a, u) + c.lambda * evaluate(*c.b, u);
          },
          [&](const AffinePullback& p) {
            return evaluate(*p.inner, detail::affine_image(u, p.z, p.w));
          },
      },
      g.node());
}

/// A finite box containing the essential support (may over-approximate).
inline BoundingBox support_box(const GSpec& g) {
  using namespace shape;
  return std::visit(
      detail::overloaded{
          [](const Disc& d) {
            return BoundingBox(d.center.real() - d.radius, d.center.real() + d.radius,
                               d.center.imag() - d.radius, d.center.imag() + d.radius);
          },
          [](const Rect& r) { return BoundingBox(r.x0, r.x1, r.y0, r.y1); },
          [](const DiscTheta& d) {
            return BoundingBox(d.center.real() - d.radius, d.center.real() + d.radius,
                               d.center.imag() - d.radius, d.center.imag() + d.radius);
          },
          [](const Raster& r) {
            return BoundingBox(r.origin.real(), r.origin.real() + r.width * r.cell_size,
                               r.origin.imag(), r.origin.imag() + r.height * r.cell_size);
          },
          [](const Scale& s) { return support_box(*s.inner); },
          [](const Union& c) { return unite(support_box(*c.a), support_box(*c.b)); },
          [](const Intersection& c) {
            const BoundingBox a = support_box(*c.a);
            const BoundingBox b = support_box(*c.b);
            const double x0 = std::max(a.x0, b.x0), x1 = std::min(a.x1, b.x1);
            const double y0 = std::max(a.y0, b.y0), y1 = std::min(a.y1, b.y1);
            if (x0 < x1 && y0 < y1) return BoundingBox(x0, x1, y0, y1);
            return a;  // empty intersection: g = 0, any box is conservative
          },
          [](const ComplementInBox& c) { return c.box; },
          [](const ConvexCombination& c) { return unite(support_box(*c.a), support_box(*c.b)); },
          [](const AffinePullback& p) {
            const BoundingBox in = support_box(*p.inner);
            const Complex corners[4] = {{in.x0, in.y0}, {in.x1, in.y0}, {in.x0, in.y1},
                                        {in.x1, in.y1}};
            double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
            for (Complex c : corners) {
              const Complex v = detail::affine_preimage(c, p.z, p.w);
              x0 = std::min(x0, v.real());
              x1 = std::max(x1, v.real());
              y0 = std::min(y0, v.imag());
              y1 = std::max(y1, v.imag());
            }
            return BoundingBox(x0, x1, y0, y1);
          },
      },
      g.node());
}

/// Smallest geometric length scale among the primitives (radii, rectangle
/// sides, raster cells), in the coordinates where g is evaluated. Sampling
/// finer than half of it resolves every jump of g along a line.
inline double feature_scale(const GSpec& g) {
  using namespace shape;
  return std::visit(
      detail::overloaded{
          [](const Disc& d) { return d.radius; },
          [](const Rect& r) { return std::min(r.x1 - r.x0, r.y1 - r.y0); },
          [](const DiscTheta& d) { return d.radius; },
          [](const Raster& r) { return r.cell_size; },
          [](const Scale& s) { return feature_scale(*s.inner); },
          [](const Union& c) { return std::min(feature_scale(*c.a), feature_scale(*c.b)); },
          [](const Intersection& c) { return std::min(feature_scale(*c.a), feature_scale(*c.b)); },
          [](const ComplementInBox& c) {
            return std::min({feature_scale(*c.inner), c.box.width(), c.box.height()});
          },
          [](const ConvexCombination& c) {
            return std::min(feature_scale(*c.a), feature_scale(*c.b));
          },
          [](const AffinePullback& p) {
            return feature_scale(*p.inner) * 2.0 / std::abs(p.z - p.w);
          },
      },
      g.node());
}

/// A line s -> origin + step * s or a circle s -> origin + step * e^{is}.
struct Curve {
  Complex origin;
  Complex step;
  bool circle;

  Complex at(double s) const {
    return circle ? origin + step * std::polar(1.0, s) : origin + step * s;
  }
  /// |du/ds|, constant along the curve.
  double speed() const { return std::abs(step); }
};

namespace detail {

/// Solutions of Re(k e^{is}) = rhs, i.e. |k| cos(s + arg k) = rhs.
inline void cos_crossings(Complex k, double rhs, std::vector<double>& out) {
  const double m = std::abs(k);
  if (!(m > 0.0)) return;
  const double ratio = rhs / m;
  if (!(ratio >= -1.0 && ratio <= 1.0)) return;
  const double a = std::acos(ratio);
  const double psi = std::arg(k);
  out.push_back(a - psi);
  out.push_back(-a - psi);
}

/// Parameters where Re(curve) = x (imag = false) or Im(curve) = x (imag = true).
inline void axis_crossings(const Curve& c, double x, bool imag, std::vector<double>& out) {
  // Im(q) = Re(-i q).
  const Complex rot = imag ? Complex(0.0, -1.0) : Complex(1.0, 0.0);
  const double base = (rot * c.origin).real();
  const Complex k = rot * c.step;
  if (c.circle) {
    cos_crossings(k, x - base, out);
  } else if (k.real() != 0.0) {
    out.push_back((x - base) / k.real());
  }
}

inline void circle_crossings(const Curve& c, Complex center, double radius,
                             std::vector<double>& out) {
  const Complex d = c.origin - center;
  if (c.circle) {
    // |d + m e^{is}|^2 = |d|^2 + |m|^2 + 2 Re(conj(d) m e^{is}).
    cos_crossings(std::conj(d) * c.step,
                  0.5 * (radius * radius - std::norm(d) - std::norm(c.step)), out);
    return;
  }
  const double a = std::norm(c.step);
  if (!(a > 0.0)) return;
  const double b = (std::conj(d) * c.step).real();
  const double disc = b * b - a * (std::norm(d) - radius * radius);
  if (!(disc >= 0.0)) return;
  const double root = std::sqrt(disc);
  out.push_back((-b - root) / a);
  out.push_back((-b + root) / a);
}

}  // namespace detail

/// Curve parameters at which the curve meets a discontinuity of g. The list
/// may contain extra points (full lines through rectangle edges, all raster
/// grid lines); between two consecutive entries g is constant along the curve.
/// For circles the values are not reduced modulo 2 pi.
inline void boundary_crossings(const GSpec& g, const Curve& c, std::vector<double>& out) {
  using namespace shape;
  auto box_edges = [&](double x0, double x1, double y0, double y1) {
    detail::axis_crossings(c, x0, false, out);
    detail::axis_crossings(c, x1, false, out);
    detail::axis_crossings(c, y0, true, out);
    detail::axis_crossings(c, y1, true, out);
  };
  std::visit(detail::overloaded{
                 [&](const Disc& d) { detail::circle_crossings(c, d.center, d.radius, out); },
                 [&](const Rect& r) { box_edges(r.x0, r.x1, r.y0, r.y1); },
                 [&](const DiscTheta& d) { detail::circle_crossings(c, d.center, d.radius, out); },
                 [&](const Raster& r) {
                   for (int i = 0; i <= r.width; ++i) {
                     detail::axis_crossings(c, r.origin.real() + i * r.cell_size, false, out);
                   }
                   for (int j = 0; j <= r.height; ++j) {
                     detail::axis_crossings(c, r.origin.imag() + j * r.cell_size, true, out);
                   }
                 },
                 [&](const Scale& s) {
                   if (s.factor != 0.0) boundary_crossings(*s.inner, c, out);
                 },
                 [&](const Union& u) {
                   boundary_crossings(*u.a, c, out);
                   boundary_crossings(*u.b, c, out);
                 },
                 [&](const Intersection& u) {
                   boundary_crossings(*u.a, c, out);
                   boundary_crossings(*u.b, c, out);
                 },
                 [&](const ComplementInBox& b) {
                   box_edges(b.box.x0, b.box.x1, b.box.y0, b.box.y1);
                   boundary_crossings(*b.inner, c, out);
                 },
                 [&](const ConvexCombination& u) {
                   boundary_crossings(*u.a, c, out);
                   boundary_crossings(*u.b, c, out);
                 },
                 [&](const AffinePullback& p) {
                   const Complex a = 0.5 * (p.z - p.w);
                   const Curve image{a * c.origin + 0.5 * (p.z + p.w), a * c.step, c.circle};
                   boundary_crossings(*p.inner, image, out);
                 },
             },
             g.node());
}

/// Circles and lines containing the discontinuities of g. A line is stored as
/// a point and a unit direction.
struct BoundaryPrimitives {
  std::vector<std::pair<Complex, double>> circles;
  std::vector<std::pair<Complex, Complex>> lines;
};

inline void boundary_primitives(const GSpec& g, BoundaryPrimitives& out) {
  using namespace shape;
  auto box_edges = [&](double x0, double x1, double y0, double y1) {
    out.lines.emplace_back(Complex(x0, 0.0), Complex(0.0, 1.0));
    out.lines.emplace_back(Complex(x1, 0.0), Complex(0.0, 1.0));
    out.lines.emplace_back(Complex(0.0, y0), Complex(1.0, 0.0));
    out.lines.emplace_back(Complex(0.0, y1), Complex(1.0, 0.0));
  };
  std::visit(detail::overloaded{
                 [&](const Disc& d) { out.circles.emplace_back(d.center, d.radius); },
                 [&](const Rect& r) { box_edges(r.x0, r.x1, r.y0, r.y1); },
                 [&](const DiscTheta& d) { out.circles.emplace_back(d.center, d.radius); },
                 [&](const Raster& r) {
                   for (int i = 0; i <= r.width; ++i) {
                     out.lines.emplace_back(Complex(r.origin.real() + i * r.cell_size, 0.0),
                                            Complex(0.0, 1.0));
                   }
                   for (int j = 0; j <= r.height; ++j) {
                     out.lines.emplace_back(Complex(0.0, r.origin.imag() + j * r.cell_size),
                                            Complex(1.0, 0.0));
                   }
                 },
                 [&](const Scale& s) {
                   if (s.factor != 0.0) boundary_primitives(*s.inner, out);
                 },
                 [&](const Union& u) {
                   boundary_primitives(*u.a, out);
                   boundary_primitives(*u.b, out);
                 },
                 [&](const Intersection& u) {
                   boundary_primitives(*u.a, out);
                   boundary_primitives(*u.b, out);
                 },
                 [&](const ComplementInBox& b) {
                   box_edges(b.box.x0, b.box.x1, b.box.y0, b.box.y1);
                   boundary_primitives(*b.inner, out);
                 },
                 [&](const ConvexCombination& u) {
                   boundary_primitives(*u.a, out);
                   boundary_primitives(*u.b, out);
                 },
                 [&](const AffinePullback& p) {
                   BoundaryPrimitives inner;
                   boundary_primitives(*p.inner, inner);
                   const Complex a = 0.5 * (p.z - p.w);
                   const Complex b = 0.5 * (p.z + p.w);
                   for (const auto& [c, r] : inner.circles) {
                     out.circles.emplace_back((c - b) / a, r / std::abs(a));
                   }
                   for (const auto& [q, d] : inner.lines) {
                     const Complex dir = d / a;
                     out.lines.emplace_back((q - b) / a, dir / std::abs(dir));
                   }
                 },
             },
             g.node());
}

inline BoundaryPrimitives boundary_primitives(const GSpec& g) {
  BoundaryPrimitives out;
  boundary_primitives(g, out);
  return out;
}

/// g_theta, the indicator of the disc bounded by the circle with angle theta.
inline GSpec g_theta(ThetaAngle theta) { return GSpec::disc_theta(theta); }

/// (1 - lambda) g + lambda g_{pi/2}: the segment from g to the unit-disc indicator.
inline GSpec convex_path(const GSpec& g, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("convex_path: lambda must lie in [0, 1]");
  return GSpec::convex_combination(lambda, g, g_theta(ThetaAngle(0.5 * pi)));
}

/// g'(v) = g((z - w) v / 2 + (z + w) / 2), the normalization sending (w, z) to (-1, 1).
inline GSpec affine_pullback(const GSpec& g, Complex z, Complex w) {
  return GSpec::pullback(g, z, w);
}

}  // namespace cauchyvals

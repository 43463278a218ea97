#pragma once

// Seeded generators for property tests. Every case gets its own engine
// seeded from (seed, case index), so a failure names a reproducible case.

#include <cstdint>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "cauchyvals/complex_geometry.hpp"

namespace prop {

using cauchyvals::Complex;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  Complex point(double half_width) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
  }
  /// Angle in (margin, pi - margin).
  double theta(double margin = 0.05) { return uniform(margin, cauchyvals::pi - margin); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs body(gen) for `cases` independently seeded cases.
template <class Body>
void for_all(std::uint64_t seed, int cases, Body&& body) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    SCOPED_TRACE("property case " + std::to_string(i) + " (seed " + std::to_string(s) + ")");
    Gen g(s);
    body(g);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

}  // namespace prop

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cauchyvals/analysis.hpp"
#include "property.hpp"

using namespace cauchyvals;

namespace {

const GSpec unit_disc = GSpec::disc(0.0, 1.0);

}  // namespace

TEST(CValue, ClosedFormAtOneMinusOne) {
  for (Engine e : {Engine::planar, Engine::cylinder, Engine::both}) {
    const IntegralResult r = c_value(unit_disc, 1.0, -1.0, QuadConfig{}, e);
    EXPECT_TRUE(r.converged) << to_string(e) << " " << r.note;
    EXPECT_NEAR(std::abs(r.value - Complex(ln2, 0.0)), 0.0, 1e-6) << to_string(e);
  }
}

TEST(CValue, ZeroDensity) {
  const IntegralResult r = c_value(zero_density(), Complex(0.3, 0.2), Complex(-0.1, 0.4));
  EXPECT_EQ(r.value, Complex(0.0, 0.0));
  EXPECT_TRUE(r.converged);
}

TEST(CValue, EnginesAgreeOnAGenericRectangle) {
  const GSpec g = GSpec::rect(-0.5, 0.6, 0.3, 1.1);
  const Complex z(0.2, 0.7), w(-0.9, -0.4);
  const IntegralResult r = c_value(g, z, w, QuadConfig{}, Engine::cylinder);
  EXPECT_NEAR(r.value.real(), 0.052286182046753973, 1e-7);
  EXPECT_NEAR(r.value.imag(), 0.082058324413314497, 1e-7);
}

TEST(CValue, DiagonalIsRejected) {
  EXPECT_THROW(c_value(unit_disc, 0.2, 0.2), DomainError);
}

TEST(DiagIntegral, UnitDiscAtTheCenterDiverges) {
  const DiagonalResult d = diag_integral(unit_disc, 0.0);
  EXPECT_EQ(d.status, DiagonalStatus::divergent);
  EXPECT_NEAR(d.log_coefficient, 2.0, 1e-6);
}

TEST(DiagIntegral, AnnulusIsTwoLogTwo) {
  const DiagonalResult d = diag_integral(annulus(0.0, 1.0, 2.0), 0.0);
  ASSERT_EQ(d.status, DiagonalStatus::finite);
  EXPECT_NEAR(d.value, 2.0 * ln2, 1e-6);
}

TEST(DiagIntegral, ZeroIsZero) {
  const DiagonalResult d = diag_integral(zero_density(), Complex(0.3, 0.1));
  ASSERT_EQ(d.status, DiagonalStatus::finite);
  EXPECT_EQ(d.value, 0.0);
}

TEST(DiagIntegral, DiscAwayFromThePoint) {
  const DiagonalResult d = diag_integral(GSpec::disc(2.0, 0.5), 0.0);
  ASSERT_EQ(d.status, DiagonalStatus::finite);
  EXPECT_NEAR(d.value, 0.064538521137571172, 1e-8);
}

TEST(DiagIntegral, HalfDensityDivergesAtHalfTheRate) {
  const DiagonalResult d = diag_integral(GSpec::scale(0.5, unit_disc), Complex(0.2, -0.1));
  EXPECT_EQ(d.status, DiagonalStatus::divergent);
  EXPECT_NEAR(d.log_coefficient, 1.0, 1e-6);
}

TEST(EValue, DiagonalConventions) {
  const EValue div = e_value(unit_disc, 0.0, 0.0);
  EXPECT_EQ(div.value, Complex(0.0, 0.0));
  EXPECT_TRUE(std::isinf(div.c.value.real()));
  const EValue ann = e_value(annulus(0.0, 1.0, 2.0), 0.0, 0.0);
  EXPECT_NEAR(ann.value.real(), 0.25, 1e-6);
}

TEST(EValue, MatchesOracleInsideADisc) {
  const EValue e = e_value(GSpec::disc(Complex(0.2, -0.3), 0.7), Complex(0.4, -0.1), Complex(-0.2, -0.5));
  EXPECT_NEAR(e.value.real(), 0.84880920524484894, 1e-7);
  EXPECT_NEAR(e.value.imag(), -0.055659620016055664, 1e-7);
}

TEST(VerifyInequality, ScaledDiscIsStrictlyInside) {
  const InequalityVerdict v = verify_inequality(GSpec::scale(0.9, unit_disc), 1.0, -1.0);
  EXPECT_EQ(v.classification, Classification::strict_interior);
  EXPECT_NEAR(v.gap, 0.13393401692638514, 1e-6);
  EXPECT_FALSE(v.matched_theta.has_value());
}

TEST(VerifyInequality, ExtremalDiscIsMatched) {
  const Complex z(0.4, 0.3), w(-0.5, -0.2);
  for (double th : {pi / 4, pi / 2}) {
    const InequalityVerdict v = verify_inequality(transformed_disc(ThetaAngle(th), z, w), z, w);
    EXPECT_EQ(v.classification, Classification::boundary_extremal) << "theta=" << th;
    ASSERT_TRUE(v.matched_theta.has_value());
    EXPECT_NEAR(*v.matched_theta, th, 1e-3);
  }
}

TEST(VerifyInequality, DiagonalCarriesTheEvidence) {
  const InequalityVerdict v = verify_inequality(unit_disc, 0.0, 0.0);
  EXPECT_TRUE(v.diagonal);
  ASSERT_TRUE(v.diagonal_result.has_value());
  EXPECT_EQ(v.diagonal_result->status, DiagonalStatus::divergent);
  EXPECT_EQ(v.classification, Classification::boundary_extremal);
}

TEST(Omega1Locate, Examples) {
  EXPECT_EQ(omega1_locate(zero_density()).location, Omega1Location::interior);
  EXPECT_EQ(omega1_locate(unit_disc).location, Omega1Location::boundary);
  EXPECT_EQ(omega1_locate(g_theta(ThetaAngle(pi / 3))).location, Omega1Location::boundary);
  EXPECT_EQ(omega1_locate(GSpec::scale(0.9, unit_disc)).location, Omega1Location::interior);
  const GSpec half = GSpec::intersect(unit_disc, GSpec::rect(-1, 1, 0, 1));
  EXPECT_EQ(omega1_locate(half).location, Omega1Location::interior);
}

TEST(StripBounds, UnitDiscIsOnTheEdge) {
  const StripCheck s = strip_bounds_check(unit_disc);
  EXPECT_TRUE(s.passes);
  EXPECT_NEAR(s.re_slack, 0.0, 1e-6);
}

TEST(StripBounds, RandomRasters) {
  prop::for_all(51, 50, [](prop::Gen& g) {
    const int w = g.integer(1, 4), h = g.integer(1, 4);
    std::vector<double> v(static_cast<std::size_t>(w * h));
    for (auto& x : v) x = g.coin(0.2) ? 1.0 : g.uniform(0.0, 1.0);
    const GSpec r = GSpec::raster(g.point(1.5), g.uniform(0.2, 0.6), w, h, v);
    const StripCheck s = strip_bounds_check(r);
    EXPECT_TRUE(s.passes) << "re_slack=" << s.re_slack << " im_slack=" << s.im_slack;
  });
}

TEST(SupportFunction, Examples) {
  const SupportResult zero = support_function(0.0, 100);
  EXPECT_NEAR(zero.theta_star, pi / 2, 1e-15);
  EXPECT_NEAR(zero.support_value, ln2, 1e-12);
  const SupportResult quarter = support_function(pi / 4, 100);
  EXPECT_NEAR(quarter.support_value, 0.80042490313693258, 1e-12);
  EXPECT_GE(quarter.agreement, 0.99);
  EXPECT_NEAR(quarter.achieved_value, quarter.support_value, 2e-2);
  EXPECT_THROW(support_function(pi / 2), DomainError);
}

TEST(SupportFunction, DominatesRandomDensities) {
  prop::for_all(52, 10, [](prop::Gen& g) {
    const double alpha = g.uniform(-1.3, 1.3);
    const SupportResult s = support_function(alpha, 20, 1);
    const GSpec d = GSpec::scale(g.uniform(0.1, 1.0), GSpec::disc(g.point(1.0), g.uniform(0.2, 1.0)));
    const IntegralResult I = cylinder_integrate(d);
    EXPECT_LE((std::polar(1.0, -alpha) * I.value).real(), s.support_value + 1e-8);
  });
}

TEST(BoundaryCrossing, Examples) {
  EXPECT_EQ(boundary_crossing(ln2, ln2), 0.0);
  EXPECT_NEAR(boundary_crossing(0.0, 1.2), 0.57762265046662111, 1e-10);
  EXPECT_NEAR(boundary_crossing(Complex(0.8, 0.8), 0.0), 0.32526854898839866, 1e-10);
  EXPECT_THROW(boundary_crossing(0.0, 0.1), DomainError);
}

TEST(RandomCorpus, IsDeterministic) {
  const auto a = random_corpus(9, 20), b = random_corpus(9, 20);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].kind, b[i].kind);
    EXPECT_EQ(a[i].z, b[i].z);
    EXPECT_EQ(a[i].w, b[i].w);
    EXPECT_GT(std::abs(a[i].z - a[i].w), 0.2);
  }
}

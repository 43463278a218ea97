// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cauchyvals/cauchyvals.hpp"

namespace cv = cauchyvals;
using cv::Complex;
using cv::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) { return cv::io::format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(const std::string& args, int& code) {
  const std::string cmd = std::string(CAUCHYVALS_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return "";
  }
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome closed_form() {
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (double th : {pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}) {
    const auto t0 = std::chrono::steady_clock::now();
    const cv::IntegralResult r = cv::cylinder_integrate(cv::g_theta(cv::ThetaAngle(th)));
    const double secs = seconds_since(t0);
    const double err = std::abs(r.value - cv::i_theta(cv::ThetaAngle(th)));
    worst = std::max(worst, err);
    slowest = std::max(slowest, secs);
    ok = ok && r.converged && err <= 1e-4 && secs <= 10.0;
  }
  return {ok, "max |I - I_theta| = " + fmt(worst) + " (tol 1e-4), slowest " + fmt(slowest) + " s (limit 10 s)"};
}

Outcome engine_cross_validation() {
  const auto corpus = cv::selftest::detail::engine_corpus(7);
  double worst = 0.0, worst_ratio = 0.0;
  bool ok = corpus.size() >= 10;
  for (const auto& [name, g] : corpus) {
    const cv::IntegralResult p = cv::planar_integrate(g, 1.0, -1.0);
    const cv::IntegralResult c = cv::cylinder_integrate(g);
    const double d = std::abs(p.value - c.value);
    const double combined = p.error_estimate + c.error_estimate;
    worst = std::max(worst, d);
    worst_ratio = std::max(worst_ratio, combined > 0.0 ? d / combined : (d > 0.0 ? INFINITY : 0.0));
    ok = ok && p.converged && c.converged && d <= 3.0 * combined && d <= 1e-3;
  }
  return {ok, std::to_string(corpus.size()) + " densities, max diff " + fmt(worst) +
                  " (tol 1e-3), max diff/combined error " + fmt(worst_ratio) + " (tol 3)"};
}

Outcome affine_reduction() {
  const auto corpus = cv::random_corpus(101, 20);
  double worst = 0.0;
  for (const auto& in : corpus) {
    const cv::IntegralResult p = cv::planar_integrate(in.g, in.z, in.w);
    const cv::IntegralResult c = cv::cylinder_integrate(cv::affine_pullback(in.g, in.z, in.w));
    worst = std::max(worst, std::abs(p.value - c.value));
  }
  return {worst <= 1e-3, "20 instances, max |planar - cylinder| = " + fmt(worst) + " (tol 1e-3)"};
}

Outcome conjugation() {
  double worst_ratio = 0.0;
  bool ok = true;
  for (int k = 1; k <= 10; ++k) {
    const double th = k * pi / 22.0;
    const cv::IntegralResult a = cv::cylinder_integrate(cv::g_theta(cv::ThetaAngle(th)));
    const cv::IntegralResult b = cv::cylinder_integrate(cv::g_theta(cv::ThetaAngle(pi - th)));
    const double d = std::abs(b.value - std::conj(a.value));
    const double bound = 2.0 * (a.error_estimate + b.error_estimate);
    worst_ratio = std::max(worst_ratio, bound > 0.0 ? d / bound : (d > 0.0 ? INFINITY : 0.0));
    ok = ok && d <= bound;
  }
  return {ok, "10 angles, max |I(pi-theta) - conj I(theta)| / (2 x error) = " + fmt(worst_ratio) + " (tol 1)"};
}

Outcome inequality() {
  const auto corpus = cv::random_corpus(2024, 200);
  const auto verdicts = cv::parallel_map(corpus.size(), 0, [&](std::size_t i) {
    return cv::verify_inequality(corpus[i].g, corpus[i].z, corpus[i].w);
  });
  std::size_t violations = 0;
  double min_margin = INFINITY;
  for (const auto& v : verdicts) {
    const double margin = v.gap + 3.0 * v.e_error;
    min_margin = std::min(min_margin, margin);
    if (margin < 0.0 || v.classification == cv::Classification::violation) ++violations;
  }
  return {violations == 0, "200 instances, violations " + std::to_string(violations) +
                               ", min (gap + 3 error) = " + fmt(min_margin) + " (tol >= 0)"};
}

Outcome equality() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_abs = 0.0, worst_theta = 0.0;
  bool ok = true;
  for (int pair = 0; pair < 2; ++pair) {
    const Complex z(u(rng), u(rng));
    Complex w(u(rng), u(rng));
    while (std::abs(z - w) < 0.3) w = Complex(u(rng), u(rng));
    for (double th : {pi / 4, pi / 2}) {
      const cv::GSpec g = cv::transformed_disc(cv::ThetaAngle(th), z, w);
      const cv::InequalityVerdict v = cv::verify_inequality(g, z, w);
      const double d = std::abs(std::abs(1.0 - v.e_value) - 1.0);
      worst_abs = std::max(worst_abs, d);
      const double dt = v.matched_theta ? std::abs(*v.matched_theta - th) : INFINITY;
      worst_theta = std::max(worst_theta, dt);
      ok = ok && d <= 1e-3 && dt <= 1e-3;
    }
  }
  return {ok, "max ||1 - E| - 1| = " + fmt(worst_abs) + " (tol 1e-3), max |matched_theta - theta| = " +
                  fmt(worst_theta) + " (tol 1e-3)"};
}

Outcome strict_interiority() {
  std::vector<cv::GSpec> shapes;
  const cv::GSpec unit = cv::g_theta(cv::ThetaAngle(0.5 * pi));
  shapes.push_back(cv::GSpec::intersect(unit, cv::GSpec::rect(-1, 1, 0, 1)));
  shapes.push_back(cv::GSpec::intersect(unit, cv::GSpec::rect(-1, 1, -1, 0)));
  shapes.push_back(cv::GSpec::intersect(unit, cv::GSpec::rect(0, 1, -1, 1)));
  shapes.push_back(cv::GSpec::intersect(unit, cv::GSpec::rect(-1, 0, -1, 1)));
  shapes.push_back(cv::annulus({0.0, 0.0}, 0.4, 1.0));
  shapes.push_back(cv::annulus({0.0, 0.0}, 0.1, 1.0));
  shapes.push_back(cv::GSpec::intersect(
      unit, cv::GSpec::complement_in(cv::BoundingBox(-1, 1, -1, 1), cv::GSpec::disc({0.3, 0.2}, 0.3))));
  shapes.push_back(cv::GSpec::scale(0.9, unit));
  shapes.push_back(cv::GSpec::scale(0.9, cv::g_theta(cv::ThetaAngle(pi / 4))));
  shapes.push_back(cv::GSpec::scale(0.9, cv::g_theta(cv::ThetaAngle(2 * pi / 3))));
  double min_delta = INFINITY, min_ratio = INFINITY;
  bool ok = true;
  for (const auto& g : shapes) {
    const cv::IntegralResult I = cv::cylinder_integrate(g);
    const double delta = 1.0 - cv::omega1_distance_proxy(I.value);
    const double err = std::abs(std::exp(I.value)) * I.error_estimate;
    min_delta = std::min(min_delta, delta);
    min_ratio = std::min(min_ratio, err > 0.0 ? delta / err : INFINITY);
    ok = ok && I.converged && delta > 3.0 * err;
  }
  return {ok, std::to_string(shapes.size()) + " densities, min delta " + fmt(min_delta) +
                  ", min delta/error " + fmt(min_ratio) + " (tol > 3)"};
}

Outcome jacobian() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> ut(-pi, pi), uth(0.05, pi - 0.05);
  double worst = 0.0;
  int n = 0;
  while (n < 1000) {
    const double t = ut(rng), th = uth(rng);
    if (std::abs(cv::zero_set_factor(t, th)) < 1e-3) continue;
    ++n;
    const double h = 1e-6;
    const Complex dt = (cv::map_u(t + h, th) - cv::map_u(t - h, th)) / (2.0 * h);
    const Complex dth = (cv::map_u(t, th + h) - cv::map_u(t, th - h)) / (2.0 * h);
    const double det = std::abs(dt.real() * dth.imag() - dt.imag() * dth.real());
    const double jac = cv::jacobian(t, th);
    worst = std::max(worst, std::abs(det - jac) / jac);
  }
  return {worst <= 1e-6, "1000 points, max relative error " + fmt(worst) + " (tol 1e-6)"};
}

Outcome kernel_identities() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> ut(-pi, pi), uth(0.05, pi - 0.05), ux(-3.0, 3.0);
  std::array<double, 4> worst{};
  std::array<int, 4> count{};
  auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::abs(b); };
  while (count[0] < 1000 || count[1] < 1000) {
    const Complex u(ux(rng), ux(rng));
    if (std::abs(u.imag()) > 1e-3 && std::abs(std::abs(u) - 1.0) > 1e-3 && count[0] < 1000) {
      worst[0] = std::max(worst[0], rel(cv::kernel_on_circle(u), cv::kernel(u)));
      ++count[0];
    }
    const Complex v = std::polar(1.0, ut(rng));
    if (std::abs(v.imag()) > 1e-3 && count[1] < 1000) {
      worst[1] = std::max(worst[1], rel(cv::kernel_on_unit_circle(v), cv::kernel(v)));
      ++count[1];
    }
  }
  while (count[2] < 1000) {
    const double t = ut(rng), th = uth(rng);
    if (std::abs(cv::zero_set_factor(t, th)) < 1e-3) continue;
    const Complex u = cv::map_u(t, th);
    if (std::abs(u.imag()) < 1e-9) continue;
    const Complex pk = cv::parametrized_kernel(t, th);
    worst[2] = std::max(worst[2], rel(pk, cv::kernel(u)));
    worst[3] = std::max(worst[3], rel(pk * cv::jacobian(t, th), cv::cylinder_coefficient(t, th)));
    ++count[2];
  }
  const double w = *std::max_element(worst.begin(), worst.end());
  return {w <= 1e-10, "4 identities x 1000 points, max relative error " + fmt(w) + " (tol 1e-10)"};
}

Outcome mass_convergence() {
  const auto m = cv::lemma1_mass_refinements(cv::GSpec::disc({0.0, 0.0}, 2.0), cv::QuadConfig{}, 5);
  double min_factor = INFINITY;
  std::string diffs;
  for (std::size_t k = 1; k < m.size(); ++k) {
    diffs += (k > 1 ? ", " : "") + fmt(std::abs(m[k] - m[k - 1]));
    if (k >= 2) min_factor = std::min(min_factor, std::abs(m[k - 1] - m[k - 2]) / std::abs(m[k] - m[k - 1]));
  }
  return {min_factor >= 1.5, "differences " + diffs + ", min decrease factor " + fmt(min_factor) + " (tol 1.5)"};
}

Outcome region_integral() {
  double worst = 0.0;
  for (double phi : {pi / 6, pi / 4, pi / 3}) {
    const cv::IntegralResult r = cv::region_iterated_integral(cv::ThetaAngle(phi));
    worst = std::max(worst, std::abs(r.value - cv::i_theta(cv::ThetaAngle(phi))));
  }
  return {worst <= 1e-3, "max |CDE integral - I_phi| = " + fmt(worst) + " (tol 1e-3)"};
}

Outcome triangle_areas() {
  const cv::TriangleAreas a = cv::cylinder_region_areas();
  const double d = std::max(std::abs(a.upper - pi * pi), std::abs(a.lower - pi * pi));
  return {d <= 1e-6, "max |area - pi^2| = " + fmt(d) + " (tol 1e-6)"};
}

Outcome support_function() {
  double min_agree = INFINITY, worst = 0.0;
  for (double a : {-1.2, -0.6, 0.0, 0.6, 1.2}) {
    const cv::SupportResult r = cv::support_function(a, 400);
    min_agree = std::min(min_agree, r.agreement);
    worst = std::max(worst, std::abs(r.achieved_value - r.support_value));
  }
  return {min_agree >= 0.995 && worst <= 1e-2, "min cell agreement " + fmt(min_agree) +
                                                   " (tol 0.995), max |achieved - support| " + fmt(worst) +
                                                   " (tol 1e-2)"};
}

Outcome operator_cross_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const cv::TruncatedShift T(400);
  std::vector<Complex> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(0.8 * (k / 4.0) * std::polar(1.0, 2.0 * pi * k / 5.0));
  const cv::GSpec unit = cv::g_theta(cv::ThetaAngle(0.5 * pi));
  const auto diffs = cv::parallel_map(25, 0, [&](std::size_t i) {
    const Complex z = pts[i / 5], w = pts[i % 5];
    return std::abs(cv::e_operator(T, z, w) - cv::e_value(unit, z, w).value);
  });
  double worst = 0.0, max_norm = 0.0;
  for (double d : diffs) worst = std::max(worst, d);
  for (Complex l : pts) max_norm = std::max(max_norm, cv::global_local_resolvent(T, l).norm());
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && max_norm <= 1.0 + 1e-6 && secs <= 60.0,
          "max |E_op - exp C| = " + fmt(worst) + " (tol 1e-3), max resolvent norm " + fmt(max_norm) +
              " (tol 1 + 1e-6), " + fmt(secs) + " s (limit 60 s)"};
}

Outcome diagonal_conventions() {
  const cv::DiagonalResult ann = cv::diag_integral(cv::annulus({0.0, 0.0}, 1.0, 2.0), 0.0);
  const cv::DiagonalResult disc = cv::diag_integral(cv::GSpec::disc({0.0, 0.0}, 1.0), 0.0);
  const cv::EValue e = cv::e_value(cv::GSpec::disc({0.0, 0.0}, 1.0), 0.0, 0.0);
  const double eop = std::abs(cv::e_operator(cv::TruncatedShift(400), 0.0, 0.0));
  const double d = std::abs(ann.value - 2.0 * cv::ln2);
  const double agree = std::abs(e.value - cv::e_operator(cv::TruncatedShift(400), 0.0, 0.0));
  const bool ok = ann.status == cv::DiagonalStatus::finite && d <= 1e-4 &&
                  disc.status == cv::DiagonalStatus::divergent && eop <= 1e-2 && agree <= 1e-2;
  return {ok, "annulus " + std::string(cv::to_string(ann.status)) + " |V - 2 ln 2| = " + fmt(d) +
                  " (tol 1e-4), unit disc " + cv::to_string(disc.status) + ", |e_operator(0,0)| = " +
                  fmt(eop) + ", |E - e_operator| = " + fmt(agree) + " (tol 1e-2)"};
}

Outcome determinism() {
  int c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  const std::string a = run_cli("selftest", c1);
  const std::string b = run_cli("selftest", c2);
  const std::string one = run_cli("selftest --threads 1", c3);
  const std::string many = run_cli("selftest --threads 4", c4);
  const bool ok = !a.empty() && a == b && one == many && a == one && c1 == c2 && c3 == c4;
  return {ok, "two runs " + std::string(a == b ? "identical" : "differ") + ", 1 vs 4 threads " +
                  (one == many ? "identical" : "differ") + ", " + std::to_string(a.size()) +
                  " bytes, exit codes " + std::to_string(c1) + "/" + std::to_string(c2) + "/" +
                  std::to_string(c3) + "/" + std::to_string(c4)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form I_theta", closed_form},
      {"engine cross-validation", engine_cross_validation},
      {"affine reduction", affine_reduction},
      {"conjugation symmetry", conjugation},
      {"inequality on random corpus", inequality},
      {"equality characterization", equality},
      {"strict interiority", strict_interiority},
      {"jacobian", jacobian},
      {"kernel identities", kernel_identities},
      {"absolute mass convergence", mass_convergence},
      {"region iterated integral", region_integral},
      {"triangle areas", triangle_areas},
      {"support function", support_function},
      {"operator cross-check", operator_cross_check},
      {"diagonal conventions", diagonal_conventions},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %-28s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

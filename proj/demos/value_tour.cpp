// Prints I_g, its distance proxy |exp(I_g) - 1| and the inequality gap at
// (1, -1) for a few densities, from the extremal disc to a half disc.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "cauchyvals/cauchyvals.hpp"

int main() {
  namespace cv = cauchyvals;
  const cv::GSpec unit = cv::g_theta(cv::ThetaAngle(0.5 * cv::pi));
  const std::vector<std::pair<std::string, cv::GSpec>> shapes = {
      {"unit disc", unit},
      {"disc theta=pi/4", cv::g_theta(cv::ThetaAngle(0.25 * cv::pi))},
      {"0.9 unit disc", cv::GSpec::scale(0.9, unit)},
      {"upper half disc", cv::GSpec::intersect(unit, cv::GSpec::rect(-1, 1, 0, 1))},
      {"annulus 0.4..1", cv::annulus({0.0, 0.0}, 0.4, 1.0)},
  };
  std::printf("%-18s %14s %14s %10s %10s %s\n", "density", "Re I", "Im I", "proxy", "gap", "location");
  for (const auto& [name, g] : shapes) {
    const cv::Omega1Report r = cv::omega1_locate(g);
    const cv::InequalityVerdict v = cv::verify_inequality(g, 1.0, -1.0, {}, cv::Engine::cylinder);
    std::printf("%-18s %14.10f %14.10f %10.6f %10.6f %s\n", name.c_str(), r.integral.value.real(),
                r.integral.value.imag(), r.proxy, v.gap, cv::to_string(v.classification));
  }
}

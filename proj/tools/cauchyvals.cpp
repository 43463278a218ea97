// cauchyvals: command-line front end for the two-point Cauchy transform library.
//
// Exit codes: 0 success, 1 configuration error, 2 non-converged integral,
// 3 inequality violation (or a failed selftest suite).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cauchyvals/cauchyvals.hpp"

namespace cv = cauchyvals;
using cv::io::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_nonconverged = 2;
constexpr int exit_violation = 3;

struct RunConfig {
  std::optional<cv::GSpec> gspec;
  std::vector<std::pair<cv::Complex, cv::Complex>> pairs;
  cv::QuadConfig quad;
  cv::Engine engine = cv::Engine::planar;
  std::uint64_t seed = 7;
  std::string out_path;
  std::string format;

  int curve_n = 101;
  std::vector<double> thetas;
  double alpha = 0.0;
  int support_grid = 400;
  int operator_n = 400;
  double operator_radius = 0.8;
  int operator_points = 5;
  std::size_t selftest_count = 200;
  unsigned threads = 0;
};

cv::Engine parse_engine(const std::string& s, const std::string& where) {
  if (s == "planar") return cv::Engine::planar;
  if (s == "cylinder") return cv::Engine::cylinder;
  if (s == "both") return cv::Engine::both;
  throw cv::ConfigError(where + ": expected planar, cylinder or both");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw cv::ConfigError(p.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void load_config(const std::filesystem::path& file, RunConfig& rc) {
  const json j = cv::io::parse_json(read_file(file), file.string());
  cv::io::reject_unknown(j, "config",
                         {"gspec", "pairs", "quad", "engine", "seed", "output", "curve", "circles",
                          "extremal", "operator", "selftest", "threads"});
  const auto base = file.parent_path();
  if (j.contains("gspec")) rc.gspec = cv::io::gspec_from_json(j.at("gspec"), "gspec", base);
  if (j.contains("pairs")) {
    const json& p = j.at("pairs");
    if (!p.is_array()) throw cv::ConfigError("pairs: expected an array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string where = "pairs[" + std::to_string(i) + "]";
      const json& e = p[i];
      if (e.is_object()) {
        cv::io::reject_unknown(e, where, {"z", "w"});
        rc.pairs.emplace_back(cv::io::read_complex(cv::io::require(e, where, "z"), where + ".z"),
                              cv::io::read_complex(cv::io::require(e, where, "w"), where + ".w"));
      } else if (e.is_array() && e.size() == 2) {
        rc.pairs.emplace_back(cv::io::read_complex(e[0], where + "[0]"),
                              cv::io::read_complex(e[1], where + "[1]"));
      } else {
        throw cv::ConfigError(where + ": expected {\"z\": .., \"w\": ..} or [z, w]");
      }
    }
  }
  if (j.contains("quad")) rc.quad = cv::io::quad_config_from_json(j.at("quad"), "quad");
  if (j.contains("engine")) {
    if (!j.at("engine").is_string()) throw cv::ConfigError("engine: expected a string");
    rc.engine = parse_engine(j.at("engine").get<std::string>(), "engine");
  }
  if (j.contains("seed")) {
    const long long s = cv::io::read_integer(j.at("seed"), "seed");
    if (s < 0) throw cv::ConfigError("seed: must be non-negative");
    rc.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("threads")) {
    const long long t = cv::io::read_integer(j.at("threads"), "threads");
    if (t < 0 || t > 4096) throw cv::ConfigError("threads: out of range");
    rc.threads = static_cast<unsigned>(t);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    cv::io::reject_unknown(o, "output", {"path", "format"});
    if (o.contains("path")) {
      if (!o.at("path").is_string()) throw cv::ConfigError("output.path: expected a string");
      const std::filesystem::path p = o.at("path").get<std::string>();
      rc.out_path = (p.is_relative() ? base / p : p).string();
    }
    if (o.contains("format")) {
      if (!o.at("format").is_string()) throw cv::ConfigError("output.format: expected a string");
      rc.format = o.at("format").get<std::string>();
    }
  }
  auto int_field = [](const json& s, const std::string& where, const char* key, int& dst) {
    if (s.contains(key)) {
      const long long v = cv::io::read_integer(s.at(key), where + "." + key);
      if (v < -(1LL << 30) || v > (1LL << 30)) throw cv::ConfigError(where + "." + key + ": out of range");
      dst = static_cast<int>(v);
    }
  };
  if (j.contains("curve")) {
    cv::io::reject_unknown(j.at("curve"), "curve", {"n"});
    int_field(j.at("curve"), "curve", "n", rc.curve_n);
  }
  if (j.contains("circles")) {
    const json& c = j.at("circles");
    cv::io::reject_unknown(c, "circles", {"thetas"});
    if (c.contains("thetas")) {
      const json& t = c.at("thetas");
      if (!t.is_array()) throw cv::ConfigError("circles.thetas: expected an array");
      rc.thetas.clear();
      for (std::size_t i = 0; i < t.size(); ++i) {
        rc.thetas.push_back(cv::io::read_number(t[i], "circles.thetas[" + std::to_string(i) + "]"));
      }
    }
  }
  if (j.contains("extremal")) {
    const json& e = j.at("extremal");
    cv::io::reject_unknown(e, "extremal", {"alpha", "grid"});
    if (e.contains("alpha")) rc.alpha = cv::io::read_number(e.at("alpha"), "extremal.alpha");
    int_field(e, "extremal", "grid", rc.support_grid);
  }
  if (j.contains("operator")) {
    const json& o = j.at("operator");
    cv::io::reject_unknown(o, "operator", {"N", "radius", "points"});
    int_field(o, "operator", "N", rc.operator_n);
    if (o.contains("radius")) rc.operator_radius = cv::io::read_number(o.at("radius"), "operator.radius");
    int_field(o, "operator", "points", rc.operator_points);
  }
  if (j.contains("selftest")) {
    const json& s = j.at("selftest");
    cv::io::reject_unknown(s, "selftest", {"count"});
    if (s.contains("count")) {
      const long long c = cv::io::read_integer(s.at("count"), "selftest.count");
      if (c < 1) throw cv::ConfigError("selftest.count: must be >= 1");
      rc.selftest_count = static_cast<std::size_t>(c);
    }
  }
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(rc.out_path, std::ios::binary);
  if (!out) throw cv::ConfigError(rc.out_path + ": cannot open output file");
  out << text;
  if (!out) throw cv::ConfigError(rc.out_path + ": write failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool want_csv(const RunConfig& rc, bool csv_default) {
  if (rc.format.empty()) return csv_default;
  if (rc.format == "csv") return true;
  if (rc.format == "json") return false;
  throw cv::ConfigError("format: expected json or csv");
}

// ---------------------------------------------------------------------------

struct EvalRow {
  cv::Complex z, w;
  std::optional<cv::InequalityVerdict> verdict;
  std::vector<double> inconclusive_evidence;
  std::string note;
};

int cmd_eval(const RunConfig& rc) {
  if (!rc.gspec) throw cv::ConfigError("eval: config needs a gspec");
  if (rc.pairs.empty()) throw cv::ConfigError("eval: config needs at least one pair");
  rc.quad.validate();
  const auto rows = cv::parallel_map(rc.pairs.size(), rc.threads, [&](std::size_t i) {
    EvalRow r;
    r.z = rc.pairs[i].first;
    r.w = rc.pairs[i].second;
    try {
      r.verdict = cv::verify_inequality(*rc.gspec, r.z, r.w, rc.quad, rc.engine);
    } catch (const cv::InconclusiveDiagonal& e) {
      r.inconclusive_evidence = e.evidence();
      r.note = e.what();
    }
    return r;
  });

  int code = exit_ok;
  for (const auto& r : rows) {
    if (!r.verdict || !r.verdict->converged) code = std::max(code, exit_nonconverged);
    if (r.verdict && r.verdict->classification == cv::Classification::violation) code = exit_violation;
  }

  if (want_csv(rc, false)) {
    cv::io::CsvWriter csv({"z_re", "z_im", "w_re", "w_im", "c_re", "c_im", "c_error", "e_re", "e_im",
                           "e_error", "gap", "classification", "matched_theta", "converged",
                           "diagonal_status"});
    for (const auto& r : rows) {
      csv.cell(r.z.real()).cell(r.z.imag()).cell(r.w.real()).cell(r.w.imag());
      if (r.verdict) {
        const auto& v = *r.verdict;
        csv.cell(v.c_value.real()).cell(v.c_value.imag()).cell(v.c_error);
        csv.cell(v.e_value.real()).cell(v.e_value.imag()).cell(v.e_error).cell(v.gap);
        csv.cell(cv::to_string(v.classification));
        csv.cell(v.matched_theta ? cv::io::format_number(*v.matched_theta) : std::string("nan"));
        csv.cell(v.converged);
      } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (int k = 0; k < 7; ++k) csv.cell(nan);
        csv.cell("inconclusive").cell("nan").cell(false);
      }
      if (!r.verdict) {
        csv.cell("inconclusive");
      } else if (r.verdict->diagonal_result) {
        csv.cell(cv::to_string(r.verdict->diagonal_result->status));
      } else {
        csv.cell("off_diagonal");
      }
      csv.end_row();
    }
    emit(rc, csv.str());
    return code;
  }

  json results = json::array();
  for (const auto& r : rows) {
    json row{{"z", cv::io::complex_json(r.z)}, {"w", cv::io::complex_json(r.w)}};
    if (r.verdict) {
      row["integral"] = cv::io::integral_result_json(r.verdict->integral);
      row["verdict"] = cv::io::verdict_json(*r.verdict);
    } else {
      row["verdict"] = nullptr;
      json ev = json::array();
      for (double v : r.inconclusive_evidence) ev.push_back(cv::io::number(v));
      row["diagonal"] = json{{"status", "inconclusive"}, {"evidence", ev}};
    }
    if (!r.note.empty()) row["note"] = r.note;
    results.push_back(row);
  }
  emit(rc, dump(json{{"engine", cv::to_string(rc.engine)},
                     {"gspec", cv::io::gspec_to_json(*rc.gspec)},
                     {"quad", cv::io::quad_config_to_json(rc.quad)},
                     {"results", results},
                     {"exit_code", code}}));
  return code;
}

int cmd_curve(const RunConfig& rc) {
  if (rc.curve_n < 2) throw cv::ConfigError("curve: n must be at least 2");
  const auto samples = cv::omega1_boundary_samples(rc.curve_n);
  if (want_csv(rc, true)) {
    cv::io::CsvWriter csv({"theta", "re", "im"});
    for (const auto& s : samples) csv.cell(s.theta).cell(s.value.real()).cell(s.value.imag()).end_row();
    emit(rc, csv.str());
  } else {
    json rows = json::array();
    for (const auto& s : samples) {
      rows.push_back({{"theta", cv::io::number(s.theta)},
                      {"re", cv::io::number(s.value.real())},
                      {"im", cv::io::number(s.value.imag())}});
    }
    emit(rc, dump(rows));
  }
  return exit_ok;
}

int cmd_circles(const RunConfig& rc) {
  std::vector<double> thetas = rc.thetas;
  if (thetas.empty()) {
    for (int k = 1; k < 8; ++k) thetas.push_back(cv::pi * k / 8.0);
  }
  std::vector<cv::CircleTheta> circles;
  for (double t : thetas) {
    if (!(t > 0.0 && t < cv::pi)) {
      throw cv::ConfigError("circles: theta " + cv::io::format_number(t) + " is outside (0, pi)");
    }
    circles.push_back(cv::circle_for_theta(cv::ThetaAngle(t)));
  }
  if (want_csv(rc, true)) {
    cv::io::CsvWriter csv({"theta", "center_im", "radius"});
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      csv.cell(thetas[i]).cell(circles[i].center.imag()).cell(circles[i].radius).end_row();
    }
    emit(rc, csv.str());
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      rows.push_back({{"theta", cv::io::number(thetas[i])},
                      {"center_im", cv::io::number(circles[i].center.imag())},
                      {"radius", cv::io::number(circles[i].radius)}});
    }
    emit(rc, dump(rows));
  }
  return exit_ok;
}

int cmd_extremal(const RunConfig& rc) {
  if (!(std::abs(rc.alpha) < 0.5 * cv::pi)) {
    throw cv::ConfigError("extremal: alpha must satisfy |alpha| < pi/2");
  }
  if (rc.support_grid < 1 || rc.support_grid > 20000) throw cv::ConfigError("extremal: grid out of range");
  const cv::SupportResult s = cv::support_function(rc.alpha, rc.support_grid);
  if (want_csv(rc, false)) {
    cv::io::CsvWriter csv({"direction_alpha", "theta_star", "support_value", "grid", "agreement",
                           "achieved_value"});
    csv.cell(s.alpha).cell(s.theta_star).cell(s.support_value).cell(static_cast<double>(s.grid));
    csv.cell(s.agreement).cell(s.achieved_value).end_row();
    emit(rc, csv.str());
  } else {
    emit(rc, dump(cv::io::support_json(s)));
  }
  return exit_ok;
}

int cmd_operator(const RunConfig& rc) {
  if (rc.operator_n < 2 || rc.operator_n > 100000) throw cv::ConfigError("operator: N out of range");
  if (rc.operator_points < 1 || rc.operator_points > 1000) {
    throw cv::ConfigError("operator: points out of range");
  }
  if (!(rc.operator_radius >= 0.0 && rc.operator_radius < 1.0)) {
    throw cv::ConfigError("operator: radius must lie in [0, 1)");
  }
  rc.quad.validate();
  const cv::TruncatedShift T(static_cast<std::size_t>(rc.operator_n));
  const int m = rc.operator_points;
  std::vector<cv::Complex> pts;
  for (int k = 0; k < m; ++k) {
    const double r = m == 1 ? 0.0 : rc.operator_radius * k / (m - 1);
    pts.push_back(r * std::polar(1.0, 2.0 * cv::pi * k / m));
  }
  const cv::GSpec unit = cv::g_theta(cv::ThetaAngle(0.5 * cv::pi));
  struct Row {
    cv::Complex z, w, eop, eint;
    bool converged;
  };
  const auto rows = cv::parallel_map(pts.size() * pts.size(), rc.threads, [&](std::size_t idx) {
    const cv::Complex z = pts[idx / pts.size()], w = pts[idx % pts.size()];
    const cv::EValue e = cv::e_value(unit, z, w, rc.quad, rc.engine);
    return Row{z, w, cv::e_operator(T, z, w), e.value, e.converged};
  });
  int code = exit_ok;
  for (const auto& r : rows) {
    if (!r.converged) code = exit_nonconverged;
  }
  if (want_csv(rc, true)) {
    cv::io::CsvWriter csv({"z_re", "z_im", "w_re", "w_im", "E_op_re", "E_op_im", "E_int_re", "E_int_im",
                           "abs_diff"});
    for (const auto& r : rows) {
      csv.cell(r.z.real()).cell(r.z.imag()).cell(r.w.real()).cell(r.w.imag());
      csv.cell(r.eop.real()).cell(r.eop.imag()).cell(r.eint.real()).cell(r.eint.imag());
      csv.cell(std::abs(r.eop - r.eint)).end_row();
    }
    emit(rc, csv.str());
  } else {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"z", cv::io::complex_json(r.z)},
                     {"w", cv::io::complex_json(r.w)},
                     {"E_op", cv::io::complex_json(r.eop)},
                     {"E_int", cv::io::complex_json(r.eint)},
                     {"abs_diff", cv::io::number(std::abs(r.eop - r.eint))},
                     {"converged", r.converged}});
    }
    emit(rc, dump(json{{"N", rc.operator_n}, {"rows", out}}));
  }
  return code;
}

int cmd_selftest(const RunConfig& rc) {
  cv::selftest::Options o;
  o.seed = rc.seed;
  o.count = rc.selftest_count;
  o.threads = rc.threads;
  o.quad = rc.quad;
  const auto suites = cv::selftest::run_all(o);
  bool ok = true;
  for (const auto& s : suites) ok = ok && s.passed();
  if (want_csv(rc, false)) {
    cv::io::CsvWriter csv({"suite", "passed", "checks", "failures", "worst"});
    for (const auto& s : suites) {
      csv.cell(s.name).cell(s.passed()).cell(static_cast<double>(s.checks));
      csv.cell(static_cast<double>(s.failures)).cell(s.worst).end_row();
    }
    emit(rc, csv.str());
  } else {
    emit(rc, dump(cv::selftest::report_json(o, suites)));
  }
  return ok ? exit_ok : exit_violation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-point Cauchy transforms of densities in the plane: evaluation, the inequality "
               "|1 - E| <= 1, the boundary curve, extremal densities and the shift-operator model."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format, engine;
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution, tol;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON run configuration (gspec, pairs, quad, engine, seed, output)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Output file (default: standard output)");
  app.add_option("--format", format, "json or csv (default: csv for curve, circles, operator; json otherwise)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "Seed of the randomized selftest corpus (default 7)");
  app.add_option("--engine", engine, "planar, cylinder or both (default planar)")
      ->check(CLI::IsMember({"planar", "cylinder", "both"}));
  app.add_option("--resolution", resolution, "Jump-search samples per unit length (default 128)");
  app.add_option("--tol", tol, "Target absolute tolerance of the outer integrals (default 1e-8)");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores (default 0); output does not depend on it");

  auto* eval = app.add_subcommand("eval", "C_g, E_g and the inequality verdict for each (z, w) pair of the config");
  auto* curve = app.add_subcommand("curve", "Samples of the boundary curve theta -> I_theta (theta, re, im)");
  std::optional<int> curve_n;
  curve->add_option("-n,--n", curve_n, "Number of samples, at least 2 (default 101)");
  auto* circles = app.add_subcommand("circles", "The circle family: theta, center_im, radius");
  std::vector<double> thetas;
  circles->add_option("--theta", thetas, "Angles in (0, pi); repeat or separate by commas (default k pi/8)")
      ->delimiter(',');
  auto* extremal = app.add_subcommand("extremal", "Support function of the value set in direction alpha");
  std::optional<double> alpha;
  std::optional<int> grid;
  extremal->add_option("--alpha", alpha, "Direction angle, |alpha| < pi/2 (default 0)");
  extremal->add_option("--grid", grid, "Cylinder grid cells per side (default 400)");
  auto* op = app.add_subcommand("operator", "Shift-operator E against exp C for the unit disc on a point grid");
  std::optional<int> op_n, op_points;
  std::optional<double> op_radius;
  op->add_option("-N,--N", op_n, "Dimension of the truncated shift (default 400)");
  op->add_option("--radius", op_radius, "Largest |z| of the grid (default 0.8)");
  op->add_option("--points", op_points, "Grid points; all ordered pairs are evaluated (default 5)");
  auto* self = app.add_subcommand("selftest", "Run every invariant suite and report pass/fail counts");
  std::optional<std::size_t> count;
  self->add_option("--count", count, "Random instances for the inequality suites (default 200)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    RunConfig rc;
    if (!config_path.empty()) load_config(config_path, rc);
    if (!out_path.empty()) rc.out_path = out_path;
    if (!format.empty()) rc.format = format;
    if (seed) rc.seed = *seed;
    if (!engine.empty()) rc.engine = parse_engine(engine, "--engine");
    if (resolution) rc.quad.planar_resolution = *resolution;
    if (tol) rc.quad.target_tol = *tol;
    if (threads) rc.threads = *threads;
    if (curve_n) rc.curve_n = *curve_n;
    if (!thetas.empty()) rc.thetas = thetas;
    if (alpha) rc.alpha = *alpha;
    if (grid) rc.support_grid = *grid;
    if (op_n) rc.operator_n = *op_n;
    if (op_radius) rc.operator_radius = *op_radius;
    if (op_points) rc.operator_points = *op_points;
    if (count) {
      if (*count < 1) throw cv::ConfigError("--count must be >= 1");
      rc.selftest_count = *count;
    }
    try {
      rc.quad.validate();
    } catch (const cv::ConfigError& e) {
      throw cv::ConfigError(std::string("quad: ") + e.what());
    }
    want_csv(rc, false);

    if (*eval) return cmd_eval(rc);
    if (*curve) return cmd_curve(rc);
    if (*circles) return cmd_circles(rc);
    if (*extremal) return cmd_extremal(rc);
    if (*op) return cmd_operator(rc);
    if (*self) return cmd_selftest(rc);
  } catch (const cv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const cv::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_nonconverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_config;
}

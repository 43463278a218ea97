#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cauchyvals/io.hpp"

using cauchyvals::io::json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(CAUCHYVALS_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) {
  return std::string(CAUCHYVALS_SOURCE_DIR) + "/configs/" + name;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("cauchyvals_test_" + name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Cli, EvalUnitDisc) {
  const CliRun r = run("eval --config " + config("unit_disc.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["results"].size(), 3u);
  EXPECT_NEAR(j["results"][0]["verdict"]["c_re"].get<double>(), 0.693147, 1e-6);
  EXPECT_NEAR(j["results"][1]["verdict"]["c_re"].get<double>(), std::log(0.8), 1e-6);
  EXPECT_EQ(j["results"][2]["verdict"]["diagonal_result"]["status"], "divergent");
  EXPECT_EQ(j["exit_code"], 0);
}

TEST(Cli, EvalZeroDensityGivesZeros) {
  const CliRun r = run("eval --config " + config("zero.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "z_re");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][4], "0");
    EXPECT_EQ(rows[i][5], "0");
    EXPECT_EQ(rows[i][7], "1");
  }
}

TEST(Cli, EvalRasterFromCsvWithBothEngines) {
  const CliRun r = run("eval --config " + config("half_disc_raster.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  for (const auto& row : j["results"]) {
    EXPECT_EQ(row["verdict"]["classification"], "strict_interior");
    EXPECT_TRUE(row["verdict"]["converged"].get<bool>());
    EXPECT_TRUE(row["integral"]["converged"].get<bool>());
  }
}

TEST(Cli, TinyResolutionIsNonConverged) {
  const CliRun r = run("eval --config " + config("pathological_resolution.json"));
  EXPECT_EQ(r.code, 2);
  const json j = json::parse(r.out);
  EXPECT_FALSE(j["results"][0]["verdict"]["converged"].get<bool>());
  const json& integral = j["results"][0]["integral"];
  for (const char* key : {"value_re", "value_im", "error", "converged", "evaluations"}) {
    EXPECT_TRUE(integral.contains(key)) << key;
  }
  EXPECT_FALSE(integral["converged"].get<bool>());
}

TEST(Cli, ResolutionFlagOverridesTheConfig) {
  const CliRun r = run("eval --config " + config("pathological_resolution.json") + " --resolution 256");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, ConfigErrorsExitOne) {
  const auto bad = temp_file("bad.json", "{\n  \"gspec\": {\"type\": \"disc\", \"center\": [0, 0], \"radius\": 1},\n  \"pairs\": [[1, -1]],\n  \"colour\": 3\n}\n");
  EXPECT_EQ(run("eval --config " + bad.string()).code, 1);
  const auto syntax = temp_file("syntax.json", "{\n  \"gspec\": \n}\n");
  EXPECT_EQ(run("eval --config " + syntax.string()).code, 1);
  EXPECT_EQ(run("eval --config /nonexistent/config.json").code, 1);
  EXPECT_EQ(run("curve --n 1").code, 1);
  EXPECT_EQ(run("circles --theta 0").code, 1);
  EXPECT_EQ(run("circles --theta 3.5").code, 1);
  EXPECT_EQ(run("curve --format xml").code, 1);
  EXPECT_EQ(run("eval --engine sideways --config " + config("unit_disc.json")).code, 1);
  EXPECT_EQ(run("extremal --alpha 2").code, 1);
  EXPECT_EQ(run("--no-such-flag curve").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, CurveThreeSamples) {
  const CliRun r = run("curve --n 3");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta", "re", "im"}));
  EXPECT_NEAR(std::stod(rows[2][0]), cauchyvals::pi / 2, 1e-11);
  EXPECT_NEAR(std::stod(rows[2][1]), 0.693147180560, 1e-11);
  EXPECT_NEAR(std::stod(rows[2][2]), 0.0, 1e-11);
}

TEST(Cli, CurveRowsSatisfyTheIdentity) {
  const CliRun r = run("curve --n 101");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 102u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::complex<double> z(std::stod(rows[i][1]), std::stod(rows[i][2]));
    EXPECT_NEAR(std::abs(std::exp(z) - 1.0), 1.0, 1e-10) << i;
  }
}

TEST(Cli, CirclesExamples) {
  const CliRun r = run("circles --theta 1.5707963267948966,0.7853981633974483,2.356194490192345");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta", "center_im", "radius"}));
  const std::vector<std::array<double, 2>> expected{{0.0, 1.0}, {1.0, std::sqrt(2.0)}, {-1.0, std::sqrt(2.0)}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(std::stod(rows[i + 1][1]), expected[i][0], 1e-11);
    EXPECT_NEAR(std::stod(rows[i + 1][2]), expected[i][1], 1e-11);
  }
  EXPECT_EQ(rows[2][2], "1.41421356237");
}

TEST(Cli, ExtremalAtZero) {
  const CliRun r = run("extremal --alpha 0 --grid 100");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["theta_star"].get<double>(), cauchyvals::pi / 2, 1e-11);
  EXPECT_NEAR(j["support_value"].get<double>(), 0.693147, 1e-6);
  EXPECT_EQ(j["extremal_gspec"]["type"], "disc_theta");
}

TEST(Cli, OperatorGrid) {
  const CliRun r = run("operator --config " + config("operator.json"));
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"z_re", "z_im", "w_re", "w_im", "E_op_re", "E_op_im",
                                               "E_int_re", "E_int_im", "abs_diff"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(rows[i][8]), 1e-3) << i;
}

TEST(Cli, OutputFileAndJsonFormat) {
  const auto path = std::filesystem::temp_directory_path() / "cauchyvals_test_circles.json";
  std::filesystem::remove(path);
  const CliRun r = run("circles --theta 1.5707963267948966 --format json --out " + path.string());
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_FALSE(j.empty());
}

TEST(Cli, SelftestSmallCountPasses) {
  const CliRun r = run("selftest --count 10 --seed 3");
  EXPECT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["suites_failed"], 0);
}

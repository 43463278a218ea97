#pragma once

// JSON and CSV forms of the library types.
//
// GSpec is a tagged union keyed by "type":
//   {"type": "disc", "center": [x, y], "radius": r}
//   {"type": "rect", "x0": .., "x1": .., "y0": .., "y1": ..}
//   {"type": "disc_theta", "theta": t}
//   {"type": "raster", "origin": [x, y], "cell_size": c, "width": w, "height": h,
//    "values": [...]}                    (row j = 0 first, each row left to right)
//   {"type": "raster", "csv": "path"}     (path relative to the config file)
//   {"type": "scale", "factor": s, "inner": G}
//   {"type": "union", "a": G, "b": G}
//   {"type": "intersection", "a": G, "b": G}
//   {"type": "complement_in_box", "box": {"x0": .., "x1": .., "y0": .., "y1": ..}, "inner": G}
//   {"type": "convex_combination", "lambda": l, "a": G, "b": G}
//   {"type": "pullback", "z": [x, y], "w": [x, y], "inner": G}
// Complex numbers are [re, im] or a bare real. Unknown keys are errors.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cauchyvals/analysis.hpp"
#include "cauchyvals/errors.hpp"
#include "cauchyvals/gfunction.hpp"
#include "cauchyvals/quadrature.hpp"

namespace cauchyvals::io {

using json = nlohmann::json;

/// 12 significant digits; "nan", "inf", "-inf" for non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// A double for JSON output, rounded to 12 significant digits; null if non-finite.
inline json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

inline json complex_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

// ---------------------------------------------------------------------------
// Reading

/// Where a field lives, for error messages: "gspec.inner.radius".
inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(join_path(path, it.key()) + ": unknown field");
  }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(join_path(path, key) + ": missing required field");
  return j.at(key);
}

inline double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline long long read_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<long long>();
}

inline Complex read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(path + ": expected [re, im] or a number");
}

inline BoundingBox read_box(const json& j, const std::string& path) {
  reject_unknown(j, path, {"x0", "x1", "y0", "y1"});
  try {
    return BoundingBox(read_number(require(j, path, "x0"), join_path(path, "x0")),
                       read_number(require(j, path, "x1"), join_path(path, "x1")),
                       read_number(require(j, path, "y0"), join_path(path, "y0")),
                       read_number(require(j, path, "y1"), join_path(path, "y1")));
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Raster CSV: a header line "width,height,origin_x,origin_y,cell_size", a
/// line with those five numbers, then `height` lines of `width` values; the
/// first value line is row j = 0 (the bottom row).
inline GSpec read_raster_csv(std::istream& in, const std::string& where) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(where + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto split = [&]() {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw fail("not a number: '" + cell + "'");
      }
    }
    return out;
  };

  if (!next_line()) throw fail("empty raster file");
  if (line.find_first_not_of(" \t") == std::string::npos ||
      line.substr(0, line.find(',')).find("width") == std::string::npos) {
    throw fail("expected header width,height,origin_x,origin_y,cell_size");
  }
  if (!next_line()) throw fail("missing raster dimensions");
  const std::vector<double> head = split();
  if (head.size() != 5) throw fail("expected 5 header values");
  const double wd = head[0], ht = head[1];
  if (wd != std::floor(wd) || ht != std::floor(ht) || wd < 1 || ht < 1 || wd * ht > 1e8) {
    throw fail("width and height must be positive integers");
  }
  const int width = static_cast<int>(wd), height = static_cast<int>(ht);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j) {
    if (!next_line()) throw fail("expected " + std::to_string(height) + " rows of values");
    const std::vector<double> row = split();
    if (row.size() != static_cast<std::size_t>(width)) {
      throw fail("expected " + std::to_string(width) + " values in the row");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  if (next_line()) throw fail("unexpected extra rows");
  try {
    return GSpec::raster({head[2], head[3]}, head[4], width, height, std::move(values));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline GSpec read_raster_csv_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open raster file");
  return read_raster_csv(in, file.string());
}

inline GSpec gspec_from_json(const json& j, const std::string& path = "gspec",
                             const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object with a \"type\" field");
  const json& tj = require(j, path, "type");
  if (!tj.is_string()) throw ConfigError(join_path(path, "type") + ": expected a string");
  const std::string type = tj.get<std::string>();
  auto num = [&](const char* key) { return read_number(require(j, path, key), join_path(path, key)); };
  auto cplx = [&](const char* key) { return read_complex(require(j, path, key), join_path(path, key)); };
  auto sub = [&](const char* key) {
    return gspec_from_json(require(j, path, key), join_path(path, key), base_dir);
  };
  try {
    if (type == "disc") {
      reject_unknown(j, path, {"type", "center", "radius"});
      return GSpec::disc(cplx("center"), num("radius"));
    }
    if (type == "rect") {
      reject_unknown(j, path, {"type", "x0", "x1", "y0", "y1"});
      return GSpec::rect(num("x0"), num("x1"), num("y0"), num("y1"));
    }
    if (type == "disc_theta") {
      reject_unknown(j, path, {"type", "theta"});
      return GSpec::disc_theta(ThetaAngle(num("theta")));
    }
    if (type == "raster") {
      if (j.contains("csv")) {
        reject_unknown(j, path, {"type", "csv"});
        const json& f = j.at("csv");
        if (!f.is_string()) throw ConfigError(join_path(path, "csv") + ": expected a path string");
        std::filesystem::path file(f.get<std::string>());
        if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
        return read_raster_csv_file(file);
      }
      reject_unknown(j, path, {"type", "origin", "cell_size", "width", "height", "values"});
      const json& vals = require(j, path, "values");
      if (!vals.is_array()) throw ConfigError(join_path(path, "values") + ": expected an array");
      std::vector<double> values;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        values.push_back(read_number(vals[i], join_path(path, "values[" + std::to_string(i) + "]")));
      }
      const long long w = read_integer(require(j, path, "width"), join_path(path, "width"));
      const long long h = read_integer(require(j, path, "height"), join_path(path, "height"));
      if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20)) {
        throw ConfigError(path + ": width and height must be positive");
      }
      return GSpec::raster(cplx("origin"), num("cell_size"), static_cast<int>(w),
                           static_cast<int>(h), std::move(values));
    }
    if (type == "scale") {
      reject_unknown(j, path, {"type", "factor", "inner"});
      return GSpec::scale(num("factor"), sub("inner"));
    }
    if (type == "union") {
      reject_unknown(j, path, {"type", "a", "b"});
      return GSpec::unite(sub("a"), sub("b"));
    }
    if (type == "intersection") {
      reject_unknown(j, path, {"type", "a", "b"});
      return GSpec::intersect(sub("a"), sub("b"));
    }
    if (type == "complement_in_box") {
      reject_unknown(j, path, {"type", "box", "inner"});
      return GSpec::complement_in(read_box(require(j, path, "box"), join_path(path, "box")),
                                  sub("inner"));
    }
    if (type == "convex_combination") {
      reject_unknown(j, path, {"type", "lambda", "a", "b"});
      return GSpec::convex_combination(num("lambda"), sub("a"), sub("b"));
    }
    if (type == "pullback") {
      reject_unknown(j, path, {"type", "z", "w", "inner"});
      return GSpec::pullback(sub("inner"), cplx("z"), cplx("w"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(join_path(path, "type") + ": unknown gspec type '" + type + "'");
}

inline json gspec_to_json(const GSpec& g) {
  using namespace shape;
  auto box_json = [](const BoundingBox& b) {
    return json{{"x0", b.x0}, {"x1", b.x1}, {"y0", b.y0}, {"y1", b.y1}};
  };
  auto cx = [](Complex z) { return json::array({z.real(), z.imag()}); };
  return std::visit(
      detail::overloaded{
          [&](const Disc& d) {
            return json{{"type", "disc"}, {"center", cx(d.center)}, {"radius", d.radius}};
          },
          [&](const Rect& r) {
            return json{{"type", "rect"}, {"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}};
          },
          [&](const DiscTheta& d) { return json{{"type", "disc_theta"}, {"theta", d.theta.value()}}; },
          [&](const Raster& r) {
            return json{{"type", "raster"},   {"origin", cx(r.origin)}, {"cell_size", r.cell_size},
                        {"width", r.width},   {"height", r.height},     {"values", *r.values}};
          },
          [&](const Scale& s) {
            return json{{"type", "scale"}, {"factor", s.factor}, {"inner", gspec_to_json(*s.inner)}};
          },
          [&](const Union& c) {
            return json{{"type", "union"}, {"a", gspec_to_json(*c.a)}, {"b", gspec_to_json(*c.b)}};
          },
          [&](const Intersection& c) {
            return json{
                {"type", "intersection"}, {"a", gspec_to_json(*c.a)}, {"b", gspec_to_json(*c.b)}};
          },
          [&](const ComplementInBox& c) {
            return json{{"type", "complement_in_box"},
                        {"box", box_json(c.box)},
                        {"inner", gspec_to_json(*c.inner)}};
          },
          [&](const ConvexCombination& c) {
            return json{{"type", "convex_combination"},
                        {"lambda", c.lambda},
                        {"a", gspec_to_json(*c.a)},
                        {"b", gspec_to_json(*c.b)}};
          },
          [&](const AffinePullback& p) {
            return json{{"type", "pullback"},
                        {"z", cx(p.z)},
                        {"w", cx(p.w)},
                        {"inner", gspec_to_json(*p.inner)}};
          },
      },
      g.node());
}

/// Fields absent from j keep their defaults.
inline QuadConfig quad_config_from_json(const json& j, const std::string& path = "quad") {
  reject_unknown(j, path,
                 {"planar_resolution", "excision_radii", "cylinder_grid", "theta_grading_exponent",
                  "target_tol", "max_refinements", "divergence_threshold"});
  QuadConfig c;
  auto field = [&](const char* key) { return join_path(path, key); };
  if (j.contains("planar_resolution")) {
    c.planar_resolution = read_number(j.at("planar_resolution"), field("planar_resolution"));
  }
  if (j.contains("excision_radii")) {
    const json& r = j.at("excision_radii");
    if (!r.is_array()) throw ConfigError(field("excision_radii") + ": expected an array");
    c.excision_radii.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      c.excision_radii.push_back(read_number(r[i], field("excision_radii") + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("cylinder_grid")) {
    const json& g = j.at("cylinder_grid");
    if (!g.is_array() || g.size() != 2) {
      throw ConfigError(field("cylinder_grid") + ": expected [n_t, n_theta]");
    }
    const long long nt = read_integer(g[0], field("cylinder_grid") + "[0]");
    const long long nth = read_integer(g[1], field("cylinder_grid") + "[1]");
    if (nt < 1 || nt > (1 << 20) || nth < 2 || nth > (1 << 20)) {
      throw ConfigError(field("cylinder_grid") + ": out of range");
    }
    c.cylinder_n_t = static_cast<int>(nt);
    c.cylinder_n_theta = static_cast<int>(nth);
  }
  if (j.contains("theta_grading_exponent")) {
    c.theta_grading_exponent = read_number(j.at("theta_grading_exponent"), field("theta_grading_exponent"));
  }
  if (j.contains("target_tol")) c.target_tol = read_number(j.at("target_tol"), field("target_tol"));
  if (j.contains("max_refinements")) {
    const long long m = read_integer(j.at("max_refinements"), field("max_refinements"));
    if (m < 1) throw ConfigError(field("max_refinements") + ": must be >= 1");
    c.max_refinements = static_cast<std::size_t>(m);
  }
  if (j.contains("divergence_threshold")) {
    c.divergence_threshold = read_number(j.at("divergence_threshold"), field("divergence_threshold"));
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

inline json quad_config_to_json(const QuadConfig& c) {
  return json{{"planar_resolution", c.planar_resolution},
              {"excision_radii", c.excision_radii},
              {"cylinder_grid", json::array({c.cylinder_n_t, c.cylinder_n_theta})},
              {"theta_grading_exponent", c.theta_grading_exponent},
              {"target_tol", c.target_tol},
              {"max_refinements", c.max_refinements},
              {"divergence_threshold", c.divergence_threshold}};
}

/// Parses JSON text; syntax errors report the line and column.
inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(where + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Writing

inline json integral_result_json(const IntegralResult& r) {
  json j{{"value_re", number(r.value.real())},
         {"value_im", number(r.value.imag())},
         {"error", number(r.error_estimate)},
         {"converged", r.converged},
         {"evaluations", r.evaluations}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json diagonal_json(const DiagonalResult& d) {
  json ev = json::array();
  for (double v : d.evidence) ev.push_back(number(v));
  json radii = json::array();
  for (double r : d.radii) radii.push_back(number(r));
  return json{{"status", to_string(d.status)},
              {"value", number(d.value)},
              {"error", number(d.error)},
              {"log_coefficient", number(d.log_coefficient)},
              {"radii", radii},
              {"evidence", ev}};
}

inline json verdict_json(const InequalityVerdict& v) {
  json j{{"c_re", number(v.c_value.real())},
              {"c_im", number(v.c_value.imag())},
              {"c_error", number(v.c_error)},
              {"e_re", number(v.e_value.real())},
              {"e_im", number(v.e_value.imag())},
              {"e_error", number(v.e_error)},
              {"gap", number(v.gap)},
              {"classification", to_string(v.classification)},
              {"matched_theta", v.matched_theta ? number(*v.matched_theta) : json(nullptr)},
              {"match_agreement", number(v.match_agreement)},
              {"diagonal", v.diagonal},
              {"converged", v.converged}};
  if (v.diagonal_result) j["diagonal_result"] = diagonal_json(*v.diagonal_result);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline json support_json(const SupportResult& s) {
  return json{{"direction_alpha", number(s.alpha)},
              {"theta_star", number(s.theta_star)},
              {"support_value", number(s.support_value)},
              {"extremal_gspec", gspec_to_json(s.extremal_gspec)},
              {"grid", s.grid},
              {"agreement", number(s.agreement)},
              {"achieved_value", number(s.achieved_value)}};
}

/// CSV with a single header row; numeric cells use format_number.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
  }

  CsvWriter& cell(double v) { return put(format_number(v)); }
  CsvWriter& cell(const std::string& s) { return put(s); }
  CsvWriter& cell(const char* s) { return put(s); }
  CsvWriter& cell(bool b) { return put(b ? "true" : "false"); }

  void end_row() {
    if (pending_.size() != columns_) throw std::logic_error("CsvWriter: wrong number of cells");
    row(pending_);
    pending_.clear();
  }

  const std::string& str() const { return out_; }

 private:
  CsvWriter& put(std::string s) {
    pending_.push_back(std::move(s));
    return *this;
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  std::size_t columns_;
  std::vector<std::string> pending_;
  std::string out_;
};

}  // namespace cauchyvals::io

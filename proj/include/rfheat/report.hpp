#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace rfheat {

struct SampleRow {
  double t = 0.0;
  double coord = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

/// Per-theorem record: evaluated points, LHS/RHS samples, minimal margin,
/// fitted constant where applicable, pass flag.
struct EstimateReport {
  std::string theorem;
  std::vector<SampleRow> rows;
  double min_margin = std::numeric_limits<double>::infinity();
  double argmin_t = 0.0;
  double argmin_coord = 0.0;
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  double t_min = 0.0;
  bool pass = false;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;

  void fold(double t, double coord, double lhs, double rhs, bool record_row) {
    const double m = rhs - lhs;
    if (m < min_margin) {
      min_margin = m;
      argmin_t = t;
      argmin_coord = coord;
    }
    if (record_row) rows.push_back({t, coord, lhs, rhs});
  }

  void finish() {
    pass = min_margin >= -tolerance;
    // keep the argmin in the recorded rows for downstream tooling
    rows.push_back({argmin_t, argmin_coord, 0.0, min_margin});
    rows.back().lhs = 0.0;
  }
};

namespace detail {
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace detail

inline void write_report_csv(const EstimateReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  out << "# rfheat-report v1: theorem,t,coord,lhs,rhs,margin\n";
  out << "theorem,t,coord,lhs,rhs,margin\n";
  for (const auto& row : r.rows)
    out << r.theorem << ',' << detail::fmt_g(row.t) << ',' << detail::fmt_g(row.coord) << ','
        << detail::fmt_g(row.lhs) << ',' << detail::fmt_g(row.rhs) << ','
        << detail::fmt_g(row.margin()) << '\n';
}

}  // namespace rfheat

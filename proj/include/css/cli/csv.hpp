#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "css/simlab/experiments.hpp"

namespace css::cli {

/// Numeric fields are printed with 12 significant digits.
inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

/// Writes `content` to `path` via a temporary file renamed into place, so
/// no partially written output survives an error.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open output path: " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing output: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("failed to move output into place: " + path);
  }
}

/// Width rows: t, method, mean_radius, radius_se; interleaved by
/// checkpoint with stable method ordering.
inline std::string width_csv(std::span<const sim::WidthPoint> points) {
  std::string out = "t,method,mean_radius,radius_se\n";
  for (const auto& pt : points) {
    out += std::to_string(pt.t);
    out += ',';
    out += pt.method;
    out += ',';
    out += format_number(pt.mean_radius);
    out += ',';
    out += format_number(pt.radius_se);
    out += '\n';
  }
  return out;
}

/// Coverage rows: replication, first_miscoverage_t (-1 when covered
/// throughout).
inline std::string coverage_csv(const sim::CoverageReport& report) {
  std::string out = "replication,first_miscoverage_t\n";
  for (std::size_t rep = 0; rep < report.first_miscoverage_t.size(); ++rep) {
    out += std::to_string(rep);
    out += ',';
    out += std::to_string(report.first_miscoverage_t[rep]);
    out += '\n';
  }
  return out;
}

struct RateRow {
  std::string method;
  sim::RateModel model;
  sim::RateFit fit;
};

inline std::string rate_csv(std::span<const RateRow> rows) {
  std::string out = "method,model,slope,intercept,n_points\n";
  for (const auto& row : rows) {
    out += row.method;
    out += ',';
    out += sim::rate_model_name(row.model);
    out += ',';
    out += format_number(row.fit.slope);
    out += ',';
    out += format_number(row.fit.intercept);
    out += ',';
    out += std::to_string(row.fit.n_points);
    out += '\n';
  }
  return out;
}

}  // namespace css::cli

#pragma once

// Time-series CSV and legacy ASCII VTK snapshots.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gradplast/errors.hpp"
#include "gradplast/grid.hpp"
#include "gradplast/models.hpp"

namespace gradplast::io {

/// Shortest round-trip decimal form, independent of the global locale.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct TimeSeriesRow {
  int step = 0;
  double level = 0.0;
  double elastic = 0.0;
  double defect = 0.0;
  double hardening = 0.0;
  double cumulative_dissipation = 0.0;
  double max_dev_sigma_e = 0.0;
  double mean_gamma = 0.0;
  double active_fraction = 0.0;
  double vi_residual = 0.0;
};

inline const char* kTimeSeriesHeader =
    "step,load_level,elastic_energy,defect_energy,hardening_energy,cumulative_dissipation,"
    "max_dev_sigma_e,mean_gamma,active_fraction,vi_residual";

inline std::string csv_line(const TimeSeriesRow& r) {
  std::string s = std::to_string(r.step);
  for (double v : {r.level, r.elastic, r.defect, r.hardening, r.cumulative_dissipation, r.max_dev_sigma_e,
                   r.mean_gamma, r.active_fraction, r.vi_residual})
    s += "," + fmt(v);
  return s;
}

inline std::string timeseries_csv(const std::vector<TimeSeriesRow>& rows) {
  std::string s = std::string(kTimeSeriesHeader) + "\n";
  for (const auto& r : rows) s += csv_line(r) + "\n";
  return s;
}

/// Writes `text` verbatim (binary mode, so LF line endings survive).
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Legacy VTK 3.0 STRUCTURED_POINTS with u, the nine components of p, gamma
/// and |dev Σ_E| as point data. Node order is x fastest, matching the grid.
inline std::string vtk_structured_points(const Grid& g, const SimState& s, const std::vector<double>& dev_sigma_e,
                                         const std::string& title) {
  const int n = g.node_count();
  if (s.u.size() != static_cast<std::size_t>(n) || s.p.size() != static_cast<std::size_t>(n) ||
      s.gamma.size() != static_cast<std::size_t>(n) || dev_sigma_e.size() != static_cast<std::size_t>(n))
    throw ValidationError("vtk: field sizes do not match the grid");
  std::string o;
  o.reserve(static_cast<std::size_t>(n) * 300);
  o += "# vtk DataFile Version 3.0\n";
  std::string t = title.empty() ? std::string("gradplast") : title.substr(0, 255);
  for (char& c : t)
    if (c == '\n' || c == '\r') c = ' ';
  o += t;
  o += "\nASCII\nDATASET STRUCTURED_POINTS\n";
  o += "DIMENSIONS " + std::to_string(g.nodes_along(0)) + " " + std::to_string(g.nodes_along(1)) + " " +
       std::to_string(g.nodes_along(2)) + "\n";
  o += "ORIGIN " + fmt(g.origin[0]) + " " + fmt(g.origin[1]) + " " + fmt(g.origin[2]) + "\n";
  o += "SPACING " + fmt(g.h[0]) + " " + fmt(g.h[1]) + " " + fmt(g.h[2]) + "\n";
  o += "POINT_DATA " + std::to_string(n) + "\n";
  o += "VECTORS u double\n";
  for (const auto& u : s.u) o += fmt(u[0]) + " " + fmt(u[1]) + " " + fmt(u[2]) + "\n";
  auto scalars = [&](const std::string& name, auto&& value) {
    o += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < n; ++v) o += fmt(value(v)) + "\n";
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      scalars("p" + std::to_string(i + 1) + std::to_string(j + 1), [&](int v) { return s.p[v](i, j); });
  scalars("gamma", [&](int v) { return s.gamma[v]; });
  scalars("dev_sigma_e", [&](int v) { return dev_sigma_e[v]; });
  return o;
}

inline std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%04d.vtk", step);
  return buf;
}

}  // namespace gradplast::io

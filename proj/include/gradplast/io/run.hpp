#pragma once

// Drives a scenario through its load program, writes outputs, and runs
// one-parameter sweeps.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "gradplast/discretization.hpp"
#include "gradplast/io/output.hpp"
#include "gradplast/io/scenario.hpp"
#include "gradplast/solver.hpp"

namespace gradplast::io {

struct StepRecord {
  LoadStep load;
  StepReport report;
};

struct RunResult {
  std::vector<TimeSeriesRow> rows;
  std::vector<StepRecord> steps;
  SimState final_state;
  int snapshots = 0;
};

/// Nodal |dev Σ_E| (|dev sym Σ_E| for irrotational variants).
inline std::vector<double> dev_eshelby_norms(const Discretization& d, const SimState& s, const Load& load) {
  const TensorField SE = eshelby_stress(d, s, load);
  std::vector<double> out(SE.size());
  for (std::size_t v = 0; v < SE.size(); ++v) out[v] = norm(d.variant().irrotational() ? dev(sym(SE[v])) : dev(SE[v]));
  return out;
}

/// Runs the load program. Outputs go below `out_dir` when it is non-empty.
/// The micromorphic model has no evolution, so only the last load is solved.
inline RunResult run_scenario(const Scenario& sc, const std::string& out_dir = "", std::ostream* log = nullptr) {
  sc.validate();
  namespace fs = std::filesystem;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
  }
  const Discretization d(sc.grid, sc.boundary, sc.variant);
  std::vector<LoadStep> program = sc.program;
  if (!sc.variant.has_flow_law()) program = {sc.program.back()};

  RunResult res;
  SimState cur = SimState::zero(sc.grid);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < program.size(); ++k) {
    const Load load = program[k].load();
    std::pair<SimState, StepReport> step;
    try {
      step = time_step(d, cur, load, sc.solver, sc.solver.dt(k));
    } catch (const NoConvergence& e) {
      throw NoConvergence("step " + std::to_string(k + 1) + ": " + e.what());
    } catch (const InfeasibleBC& e) {
      throw InfeasibleBC("step " + std::to_string(k + 1) + ": " + e.what());
    }
    cur = std::move(step.first);
    const StepReport& r = step.second;
    cumulative += r.dissipated_energy;
    TimeSeriesRow row;
    row.step = static_cast<int>(k + 1);
    row.level = program[k].level;
    row.elastic = r.energy.elastic;
    row.defect = r.energy.defect;
    row.hardening = r.energy.hardening;
    row.cumulative_dissipation = cumulative;
    row.max_dev_sigma_e = r.max_dev_sigma_e;
    row.mean_gamma = r.mean_gamma;
    row.active_fraction = r.active_node_fraction;
    row.vi_residual = r.vi_residual;
    res.rows.push_back(row);
    res.steps.push_back({program[k], r});
    if (log)
      *log << "step " << row.step << " level " << fmt(row.level) << " iterations " << r.outer_iterations
           << " active " << fmt(r.active_node_fraction) << "\n";
    const int stride = sc.output.vtk_stride;
    const bool last = k + 1 == program.size();
    if (!out_dir.empty() && stride > 0 && (row.step % stride == 0 || last)) {
      const std::string title = sc.name + " step " + std::to_string(row.step);
      write_file((fs::path(out_dir) / snapshot_name(row.step)).string(),
                 vtk_structured_points(sc.grid, cur, dev_eshelby_norms(d, cur, load), title));
      ++res.snapshots;
    }
  }
  if (!out_dir.empty()) write_file((fs::path(out_dir) / sc.output.csv).string(), timeseries_csv(res.rows));
  res.final_state = std::move(cur);
  return res;
}

/// Slope of max |σ_ab| against load level over the final run of plastic
/// steps whose amplitude keeps moving in one direction. The first plastic
/// step of the run is skipped since it straddles the elastic limit. NaN when
/// fewer than two such steps exist.
inline double apparent_hardening_slope(const std::vector<StepRecord>& steps) {
  int end = static_cast<int>(steps.size()) - 1;
  while (end >= 0 && !(steps[end].report.active_node_fraction > 0.0)) --end;
  if (end < 1) return std::nan("");
  const double dir = steps[end].load.amplitude - steps[end - 1].load.amplitude;
  int begin = end;
  while (begin > 0 && steps[begin - 1].report.active_node_fraction > 0.0 &&
         (steps[begin].load.amplitude - steps[begin - 1].load.amplitude) * dir > 0.0)
    --begin;
  ++begin;
  if (end - begin < 1) return std::nan("");
  const auto& a = steps[begin];
  const auto& b = steps[end];
  return (b.report.max_abs_shear - a.report.max_abs_shear) / (b.load.level - a.load.level);
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  std::string status = "ok";
  /// 0 when the run succeeded, else the CLI exit code of its error class.
  int failure = 0;
  int steps = 0;
  double elastic = 0.0, defect = 0.0, hardening = 0.0, dissipation = 0.0;
  double hardening_slope = std::nan("");
  long outer_iterations = 0;
  long cg_iterations = 0;
};

inline const char* kSweepHeader =
    "parameter,value,status,steps,elastic_energy,defect_energy,hardening_energy,cumulative_dissipation,"
    "hardening_slope,outer_iterations,cg_iterations";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    s += r.parameter + "," + fmt(r.value) + "," + status + "," + std::to_string(r.steps) + "," + fmt(r.elastic) +
         "," + fmt(r.defect) + "," + fmt(r.hardening) + "," + fmt(r.dissipation) + "," + fmt(r.hardening_slope) +
         "," + std::to_string(r.outer_iterations) + "," + std::to_string(r.cg_iterations) + "\n";
  }
  return s;
}

/// Copy of `base` with one parameter replaced. "grid" sets the cells per axis
/// and keeps the domain extent.
inline Scenario with_parameter(const Scenario& base, const std::string& param, double value) {
  Scenario s = base;
  auto& p = s.variant.params;
  if (param == "Lc") p.Lc = value;
  else if (param == "k1") p.k1 = value;
  else if (param == "k2") p.k2 = value;
  else if (param == "grid") {
    const int n = static_cast<int>(std::lround(value));
    if (n < 1 || std::abs(value - n) > 1e-12) throw ValidationError("grid sweep values must be positive integers");
    const Vec3 ext = base.grid.extent();
    s.grid.n = {n, n, n};
    for (int d = 0; d < 3; ++d) s.grid.h[d] = ext[d] / n;
  } else {
    throw ValidationError("unknown sweep parameter '" + param + "' (expected Lc, k1, k2 or grid)");
  }
  if (param == "k1" && !s.variant.kinematic()) throw ValidationError("k1 does not apply to " + std::string(to_string(s.variant.tag)));
  if (param == "k2" && !s.variant.isotropic()) throw ValidationError("k2 does not apply to " + std::string(to_string(s.variant.tag)));
  return s;
}

inline std::string sweep_dir_name(const std::string& param, double value) { return param + "_" + fmt(value); }

/// One run per value; a failing value is recorded and the sweep continues.
/// Each run writes into its own subdirectory of `out_dir`.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::string& param, const std::vector<double>& values,
                                   const std::string& out_dir = "", std::ostream* log = nullptr) {
  if (values.empty()) throw ValidationError("sweep: no values given");
  (void)with_parameter(base, param, values.front());  // reject unknown parameters up front
  std::vector<SweepRow> rows;
  for (double v : values) {
    SweepRow row;
    row.parameter = param;
    row.value = v;
    try {
      const Scenario s = with_parameter(base, param, v);
      const std::string dir = out_dir.empty() ? "" : (std::filesystem::path(out_dir) / sweep_dir_name(param, v)).string();
      const RunResult r = run_scenario(s, dir, log);
      row.steps = static_cast<int>(r.rows.size());
      const auto& last = r.rows.back();
      row.elastic = last.elastic;
      row.defect = last.defect;
      row.hardening = last.hardening;
      row.dissipation = last.cumulative_dissipation;
      row.hardening_slope = apparent_hardening_slope(r.steps);
      for (const auto& st : r.steps) {
        row.outer_iterations += st.report.outer_iterations;
        row.cg_iterations += st.report.cg_iterations;
      }
    } catch (const NoConvergence& e) {
      row.status = std::string("error: ") + e.what();
      row.failure = 3;
    } catch (const IoError& e) {
      row.status = std::string("error: ") + e.what();
      row.failure = 4;
    } catch (const Error& e) {
      row.status = std::string("error: ") + e.what();
      row.failure = 2;
    }
    if (log) *log << param << " = " << fmt(v) << ": " << row.status << "\n";
    rows.push_back(row);
  }
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    write_file((std::filesystem::path(out_dir) / "summary.csv").string(), sweep_csv(rows));
  }
  return rows;
}

}  // namespace gradplast::io

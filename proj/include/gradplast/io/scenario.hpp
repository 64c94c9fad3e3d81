#pragma once

// Scenario documents: JSON with "version": 1. parse_scenario validates
// everything; emit_scenario writes the canonical form (explicit step list),
// which parses back to an equal Scenario.

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradplast/assembly.hpp"
#include "gradplast/discretization.hpp"
#include "gradplast/models.hpp"
#include "gradplast/solver.hpp"

namespace gradplast::io {

using json = nlohmann::json;

struct LoadStep {
  double level = 0.0;      ///< pseudo-time, strictly increasing
  double amplitude = 0.0;  ///< scales the boundary displacement pattern
  Vec3 body_force{0.0, 0.0, 0.0};

  Load load() const { return {amplitude, body_force}; }
  friend bool operator==(const LoadStep&, const LoadStep&) = default;
};

struct OutputConfig {
  std::string csv = "timeseries.csv";
  int vtk_stride = 0;  ///< 0 disables field snapshots
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Scenario {
  std::string name = "scenario";
  ModelVariant variant;
  Grid grid;
  BoundaryConfig boundary;
  std::vector<LoadStep> program;
  SolverConfig solver;
  OutputConfig output;

  std::vector<Load> loads() const {
    std::vector<Load> l;
    l.reserve(program.size());
    for (const auto& s : program) l.push_back(s.load());
    return l;
  }

  void validate() const {
    variant.validate();
    grid.validate();
    boundary.validate();
    solver.validate();
    if (program.empty()) throw ValidationError("load.steps: program must contain at least one step");
    for (std::size_t k = 0; k < program.size(); ++k) {
      const auto& s = program[k];
      if (!std::isfinite(s.level) || !std::isfinite(s.amplitude) || !std::isfinite(s.body_force[0]) ||
          !std::isfinite(s.body_force[1]) || !std::isfinite(s.body_force[2]))
        throw ValidationError("load.steps[" + std::to_string(k) + "]: values must be finite");
      if (k > 0 && !(s.level > program[k - 1].level))
        throw ValidationError("load.steps[" + std::to_string(k) + "]: level must increase strictly");
    }
    if (output.vtk_stride < 0) throw ValidationError("output.vtk_stride must be >= 0");
    if (output.csv.empty()) throw ValidationError("output.csv must be non-empty");
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(where() + "expected an object");
  }

  /// Rejects keys outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ValidationError(where() + "unknown key '" + it.key() + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const {
    if (!has(key)) throw ValidationError(where() + "missing key '" + key + "'");
    return j_.at(key);
  }
  Reader child(const char* key) const { return Reader(at(key), path_ + key + "."); }

  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
  double number(const char* key) const { return to_number(at(key), path_ + key); }
  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ParseError(path_ + key + ": expected an integer");
    return v.get<int>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ParseError(path_ + key + ": expected a string");
    return v.get<std::string>();
  }
  Vec3 vec3(const char* key, Vec3 fallback) const {
    if (!has(key)) return fallback;
    return to_vec3(at(key), path_ + key);
  }

  static double to_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
    }
    throw ParseError(where + ": expected a number");
  }
  static Vec3 to_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ParseError(where + ": expected an array of 3 numbers");
    return {to_number(v[0], where), to_number(v[1], where), to_number(v[2], where)};
  }
  static FaceSet faces(const json& v, const std::string& where) {
    if (v.is_string()) return FaceSet::from_name(v.get<std::string>());
    if (!v.is_array()) throw ParseError(where + ": expected a face name or a list of face names");
    FaceSet f;
    for (const auto& e : v) {
      if (!e.is_string()) throw ParseError(where + ": face names must be strings");
      f = f | FaceSet::from_name(e.get<std::string>());
    }
    return f;
  }

  std::string where() const { return path_.empty() ? std::string() : path_.substr(0, path_.size() - 1) + ": "; }
  const json& raw() const { return j_; }

 private:
  const json& j_;
  std::string path_;
};

inline json number_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

inline json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace detail

inline Scenario scenario_from_json(const json& doc) {
  using detail::Reader;
  Reader r(doc, "");
  r.only({"version", "name", "variant", "defect_form", "material", "grid", "boundary", "load", "solver", "output"});
  if (!r.has("version")) throw ValidationError("missing key 'version'");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    throw ValidationError("version: only version 1 is supported");

  Scenario s;
  s.name = r.string("name", s.name);
  if (!r.has("variant")) throw ValidationError("missing key 'variant'");
  if (!doc["variant"].is_string()) throw ParseError("variant: expected a string");
  s.variant.tag = variant_from_string(doc["variant"].get<std::string>());
  const std::string form = r.string("defect_form", "curl");
  if (form == "curl") s.variant.defect_form = DefectForm::Curl;
  else if (form == "microstress") s.variant.defect_form = DefectForm::Microstress;
  else throw ValidationError("defect_form: expected 'curl' or 'microstress'");

  {
    const Reader m = r.child("material");
    m.only({"mu", "lambda", "k1", "k2", "Lc", "sigma_y"});
    auto& p = s.variant.params;
    p.mu = m.number("mu");
    p.lambda = m.number("lambda");
    p.kappa = p.lambda + 2.0 * p.mu / 3.0;
    p.k1 = m.number("k1", 0.0);
    p.k2 = m.number("k2", 0.0);
    p.Lc = m.number("Lc", 0.0);
    if (s.variant.has_flow_law()) p.sigma_y = m.number("sigma_y");
    else p.sigma_y = m.number("sigma_y", std::numeric_limits<double>::infinity());
  }
  {
    const Reader g = r.child("grid");
    g.only({"cells", "size", "spacing", "origin"});
    const json& c = g.at("cells");
    if (c.is_number_integer()) {
      s.grid.n = {c.get<int>(), c.get<int>(), c.get<int>()};
    } else if (c.is_array() && c.size() == 3 && c[0].is_number_integer() && c[1].is_number_integer() &&
               c[2].is_number_integer()) {
      s.grid.n = {c[0].get<int>(), c[1].get<int>(), c[2].get<int>()};
    } else {
      throw ParseError("grid.cells: expected an integer or an array of 3 integers");
    }
    for (int d = 0; d < 3; ++d)
      if (s.grid.n[d] < 1) throw ValidationError("grid.cells: must be >= 1");
    if (g.has("size") && g.has("spacing")) throw ValidationError("grid: give 'size' or 'spacing', not both");
    auto triple = [&](const char* key) {
      const json& z = g.at(key);
      return z.is_number() ? Vec3{z.get<double>(), z.get<double>(), z.get<double>()}
                           : Reader::to_vec3(z, std::string("grid.") + key);
    };
    if (g.has("spacing")) {
      s.grid.h = triple("spacing");
      for (int d = 0; d < 3; ++d)
        if (!(s.grid.h[d] > 0.0)) throw ValidationError("grid.spacing: must be > 0");
    } else {
      const Vec3 size = g.has("size") ? triple("size") : Vec3{1.0, 1.0, 1.0};
      for (int d = 0; d < 3; ++d) {
        if (!(size[d] > 0.0)) throw ValidationError("grid.size: must be > 0");
        s.grid.h[d] = size[d] / s.grid.n[d];
      }
    }
    s.grid.origin = g.vec3("origin", {0.0, 0.0, 0.0});
  }
  if (r.has("boundary")) {
    const Reader b = r.child("boundary");
    b.only({"dirichlet_faces", "displacement_gradient", "micro_hard_faces"});
    if (b.has("dirichlet_faces")) s.boundary.gamma_faces = Reader::faces(b.at("dirichlet_faces"), "boundary.dirichlet_faces");
    if (b.has("micro_hard_faces"))
      s.boundary.micro_hard_faces = Reader::faces(b.at("micro_hard_faces"), "boundary.micro_hard_faces");
    if (b.has("displacement_gradient")) {
      const json& H = b.at("displacement_gradient");
      if (!H.is_array() || H.size() != 3) throw ParseError("boundary.displacement_gradient: expected 3 rows");
      for (int i = 0; i < 3; ++i) {
        const Vec3 row = Reader::to_vec3(H[i], "boundary.displacement_gradient");
        for (int j = 0; j < 3; ++j) s.boundary.displacement_gradient(i, j) = row[j];
      }
    }
  }
  {
    const Reader l = r.child("load");
    l.only({"steps", "segments", "body_force"});
    if (l.has("steps") == l.has("segments")) throw ValidationError("load: give exactly one of 'steps' or 'segments'");
    if (l.has("steps")) {
      if (l.has("body_force")) throw ValidationError("load.body_force: only used with 'segments'");
      const json& st = l.at("steps");
      if (!st.is_array()) throw ParseError("load.steps: expected an array");
      for (std::size_t k = 0; k < st.size(); ++k) {
        const Reader e(st[k], "load.steps[" + std::to_string(k) + "].");
        e.only({"level", "amplitude", "body_force"});
        LoadStep ls;
        ls.level = e.number("level");
        ls.amplitude = e.number("amplitude", ls.level);
        ls.body_force = e.vec3("body_force", {0.0, 0.0, 0.0});
        s.program.push_back(ls);
      }
    } else {
      // piecewise-linear amplitude path; body force scales with the amplitude
      const Vec3 f = l.vec3("body_force", {0.0, 0.0, 0.0});
      const json& seg = l.at("segments");
      if (!seg.is_array()) throw ParseError("load.segments: expected an array");
      double a = 0.0, level = 0.0;
      for (std::size_t k = 0; k < seg.size(); ++k) {
        const Reader e(seg[k], "load.segments[" + std::to_string(k) + "].");
        e.only({"to", "steps"});
        const double to = e.number("to");
        const int n = e.integer("steps", 1);
        if (n < 1) throw ValidationError("load.segments[" + std::to_string(k) + "].steps: must be >= 1");
        const double from = a;
        for (int i = 1; i <= n; ++i) {
          const double next = from + (to - from) * i / n;
          level += std::abs(next - a);
          a = next;
          s.program.push_back({level, a, {f[0] * a, f[1] * a, f[2] * a}});
        }
      }
    }
  }
  if (r.has("solver")) {
    const Reader v = r.child("solver");
    v.only({"dt", "tol_outer", "tol_cg", "tol_fista", "max_outer", "max_cg", "max_fista", "lipschitz_safety",
            "power_iterations", "vi_probes", "seed"});
    auto& c = s.solver;
    if (v.has("dt")) {
      const json& dt = v.at("dt");
      if (dt.is_number()) c.dt_schedule = {dt.get<double>()};
      else if (dt.is_array()) {
        c.dt_schedule.clear();
        for (const auto& e : dt) c.dt_schedule.push_back(Reader::to_number(e, "solver.dt"));
      } else {
        throw ParseError("solver.dt: expected a number or an array");
      }
    }
    c.tol_outer = v.number("tol_outer", c.tol_outer);
    c.tol_cg = v.number("tol_cg", c.tol_cg);
    c.tol_fista = v.number("tol_fista", c.tol_fista);
    c.max_outer = v.integer("max_outer", c.max_outer);
    c.max_cg = v.integer("max_cg", c.max_cg);
    c.max_fista = v.integer("max_fista", c.max_fista);
    c.lipschitz_safety = v.number("lipschitz_safety", c.lipschitz_safety);
    c.power_iterations = v.integer("power_iterations", c.power_iterations);
    c.vi_probes = v.integer("vi_probes", c.vi_probes);
    if (v.has("seed")) {
      const json& sd = v.at("seed");
      if (!sd.is_number_unsigned()) throw ParseError("solver.seed: expected a non-negative integer");
      c.seed = sd.get<std::uint64_t>();
    }
    if (c.power_iterations < 1) throw ValidationError("solver.power_iterations: must be >= 1");
    if (c.vi_probes < 0) throw ValidationError("solver.vi_probes: must be >= 0");
  }
  if (r.has("output")) {
    const Reader o = r.child("output");
    o.only({"csv", "vtk_stride"});
    s.output.csv = o.string("csv", s.output.csv);
    s.output.vtk_stride = o.integer("vtk_stride", s.output.vtk_stride);
  }
  s.validate();
  return s;
}

inline Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return scenario_from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

inline json scenario_to_json(const Scenario& s) {
  using detail::number_json;
  using detail::vec_json;
  json j;
  j["version"] = 1;
  j["name"] = s.name;
  j["variant"] = std::string(to_string(s.variant.tag));
  j["defect_form"] = s.variant.defect_form == DefectForm::Curl ? "curl" : "microstress";
  const auto& p = s.variant.params;
  j["material"] = {{"mu", p.mu}, {"lambda", p.lambda}, {"k1", p.k1}, {"k2", p.k2}, {"Lc", p.Lc},
                   {"sigma_y", number_json(p.sigma_y)}};
  j["grid"] = {{"cells", json::array({s.grid.n[0], s.grid.n[1], s.grid.n[2]})},
               {"spacing", vec_json(s.grid.h)},
               {"origin", vec_json(s.grid.origin)}};
  json H = json::array();
  for (int i = 0; i < 3; ++i) H.push_back(vec_json(row(s.boundary.displacement_gradient, i)));
  j["boundary"] = {{"dirichlet_faces", s.boundary.gamma_faces.names()}, {"displacement_gradient", H}};
  if (s.boundary.micro_hard_faces) j["boundary"]["micro_hard_faces"] = s.boundary.micro_hard_faces->names();
  json steps = json::array();
  for (const auto& st : s.program)
    steps.push_back({{"level", st.level}, {"amplitude", st.amplitude}, {"body_force", vec_json(st.body_force)}});
  j["load"] = {{"steps", steps}};
  const auto& c = s.solver;
  j["solver"] = {{"dt", c.dt_schedule},
                 {"tol_outer", c.tol_outer},
                 {"tol_cg", c.tol_cg},
                 {"tol_fista", c.tol_fista},
                 {"max_outer", c.max_outer},
                 {"max_cg", c.max_cg},
                 {"max_fista", c.max_fista},
                 {"lipschitz_safety", c.lipschitz_safety},
                 {"power_iterations", c.power_iterations},
                 {"vi_probes", c.vi_probes},
                 {"seed", c.seed}};
  j["output"] = {{"csv", s.output.csv}, {"vtk_stride", s.output.vtk_stride}};
  return j;
}

inline std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace gradplast::io

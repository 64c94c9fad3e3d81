// Command-line front end.
//   gradplast run <config.json>
//   gradplast sweep <config.json> --param Lc --values 0.0,0.1,0.2
//   gradplast korn <config.json> [--no-bc]
//   gradplast oracle-check
// Exit codes: 0 ok, 1 failed self-check or internal error, 2 invalid input,
// 3 solver non-convergence, 4 I/O error. A sweep exits with the code of its
// first failing value.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gradplast/io/run.hpp"
#include "gradplast/io/scenario.hpp"
#include "gradplast/korn.hpp"
#include "gradplast/oracles/self_test.hpp"

namespace {

using namespace gradplast;

enum Exit { kOk = 0, kFailed = 1, kInvalid = 2, kNoConvergence = 3, kIo = 4 };

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ValidationError("--values: empty entry");
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ValidationError("--values: '" + item + "' is not a number");
    }
    if (pos != item.size()) throw ValidationError("--values: '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("--values: no values given");
  return out;
}

io::Scenario load_scenario(const std::string& path) { return io::parse_scenario(io::read_file(path)); }

int cmd_run(const std::string& config, const std::string& out, bool quiet) {
  const auto sc = load_scenario(config);
  const auto r = io::run_scenario(sc, out, quiet ? nullptr : &std::cout);
  if (!quiet)
    std::cout << "wrote " << r.rows.size() << " rows and " << r.snapshots << " snapshots to " << out << "\n";
  return kOk;
}

int cmd_sweep(const std::string& config, const std::string& param, const std::string& values,
              const std::string& out, bool quiet) {
  const auto sc = load_scenario(config);
  const auto rows = io::sweep(sc, param, parse_values(values), out, quiet ? nullptr : &std::cout);
  if (!quiet) std::cout << io::sweep_csv(rows);
  // every value is attempted; the first failure decides the exit code
  for (const auto& r : rows)
    if (r.failure != 0) return r.failure;
  return kOk;
}

int cmd_korn(const std::string& config, bool no_bc, bool quiet) {
  const auto sc = load_scenario(config);
  KornProblem prob{sc.grid, no_bc ? FaceSet::none() : sc.boundary.hard_faces(), 1.0};
  const KornResult r = estimate_min_quotient(prob, 1e-8);
  TensorField skew(sc.grid.node_count(), Mat3::zero());
  for (auto& m : skew) m = anti(Vec3{0.3, -0.5, 0.8});
  double q_skew = std::nan("");
  try {
    q_skew = korn_quotient(prob, skew);
  } catch (const ZeroField&) {
  }
  const auto names = prob.gamma_faces.names();
  std::string faces;
  for (const auto& n : names) faces += (faces.empty() ? "" : " ") + n;
  if (!quiet) std::cout << "faces: " << (faces.empty() ? "none" : faces) << "\n";
  std::cout << "lambda_min " << io::fmt(r.lambda_min) << "\n"
            << "korn_constant " << io::fmt(r.constant) << "\n"
            << "quotient_constant_skew " << io::fmt(q_skew) << "\n";
  if (!quiet) std::cout << "inverse iterations " << r.iterations << ", CG iterations " << r.cg_iterations << "\n";
  return kOk;
}

int cmd_oracle_check(bool quiet) {
  const auto results = oracle::run_oracle_self_tests();
  bool all = true;
  for (const auto& c : results) {
    all = all && c.passed;
    if (!quiet || !c.passed)
      std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << io::fmt(c.value) << " <= "
                << io::fmt(c.limit) << ")\n";
  }
  std::cout << (all ? "all oracle checks passed" : "oracle checks FAILED") << "\n";
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient plasticity with plastic spin: incremental solver and checks", "gradplast"};
  app.require_subcommand(1);
  std::string out = "out";
  bool quiet = false;
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string config;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("config", config, "Scenario JSON")->required();

  std::string param, values;
  auto* sw = app.add_subcommand("sweep", "Sweep one parameter of a scenario");
  sw->add_option("config", config, "Scenario JSON")->required();
  sw->add_option("--param", param, "Lc, k1, k2 or grid")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();

  bool no_bc = false;
  auto* korn = app.add_subcommand("korn", "Estimate the discrete Korn constant");
  korn->add_option("config", config, "Scenario JSON")->required();
  korn->add_flag("--no-bc", no_bc, "Drop the tangential boundary condition");

  auto* oc = app.add_subcommand("oracle-check", "Run the reference self-checks");

  for (auto* sub : {run, sw, korn, oc}) {
    sub->add_option("--out", out, "Output directory");
    sub->add_flag("--quiet", quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config, out, quiet);
    if (*sw) return cmd_sweep(config, param, values, out, quiet);
    if (*korn) return cmd_korn(config, no_bc, quiet);
    if (*oc) return cmd_oracle_check(quiet);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const SingularBlock& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InfeasibleBC& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}

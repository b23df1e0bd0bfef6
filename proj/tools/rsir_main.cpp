#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rsir/functionals.hpp"
#include "rsir/oracles.hpp"
#include "rsir/optimizer.hpp"
#include "rsir/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace rsir;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

int env_threads(int fallback) {
  if (const char* s = std::getenv("RENEWAL_SIR_THREADS")) return std::atoi(s);
  return fallback;
}

struct CommonOpts {
  std::string out_dir;
  double tol = -1.0;
  bool quiet = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

ScenarioFileModel load_model(const std::string& path, const CommonOpts& c) {
  ScenarioFileModel m = parse_scenario_file(path);
  if (c.tol > 0) m.solver.solver_tol = c.tol;
  if (c.seed_set) m.optimize.seed = c.seed;
  return m;
}

fs::path prepare_out(const std::string& requested, const std::string& scenario_path) {
  fs::path out = requested.empty()
                     ? fs::path(scenario_path).replace_extension("").concat("_out")
                     : fs::path(requested);
  fs::create_directories(out);
  return out;
}

void write_profiles(const fs::path& dir, const Trajectory& tr) {
  fs::create_directories(dir);
  const int want = 11;
  const int last = tr.steps();
  int stride = std::max(1, last / (want - 1));
  int idx = 0;
  for (int k = 0; k <= last; k += stride, ++idx) {
    char name[32];
    std::snprintf(name, sizeof name, "profile_%03d.csv", idx);
    write_profile_csv((dir / name).string(), tr.states[k]);
  }
  if (last % stride != 0) {
    char name[32];
    std::snprintf(name, sizeof name, "profile_%03d.csv", idx);
    write_profile_csv((dir / name).string(), tr.states[last]);
  }
}

int cmd_check(const std::string& path, const CommonOpts& c) {
  ScenarioFileModel m = load_model(path, c);
  Scenario sc = build_scenario(m);
  ValidationReport rep = validate_scenario(sc);
  if (!c.quiet) std::cout << rep.to_string();
  return rep.valid ? kExitOk : kExitValidation;
}

int cmd_simulate(const std::string& path, const CommonOpts& c) {
  ScenarioFileModel m = load_model(path, c);
  Scenario sc = build_scenario(m);
  ValidationReport rep = validate_scenario(sc);
  if (!rep.valid) {
    std::cerr << rep.to_string();
    return kExitValidation;
  }
  Trajectory tr = simulate(sc);
  fs::path out = prepare_out(c.out_dir, path);
  {
    std::ofstream f(out / "resolved.scn", std::ios::binary);
    f << serialize_scenario(m);
  }
  write_trajectory_csv((out / "trajectory.csv").string(), tr, sc.config.output_stride);
  write_summary_csv((out / "summary.csv").string(), tr);
  write_profiles(out / "profiles", tr);
  if (!c.quiet) {
    int iters = 0;
    for (const auto& w : tr.windows) iters += w.iterations;
    std::cout << "simulated to t = " << tr.end_time << " in " << tr.windows.size()
              << " windows, " << iters << " fixed-point iterations\n";
    const auto& fin = tr.states.back();
    std::cout << "final masses: S = " << fin.S.integral() << ", I = " << fin.I.integral()
              << ", R = " << fin.R.integral() << "\n";
    std::cout << "outputs in " << out.string() << "\n";
  }
  if (tr.status == TerminationStatus::BlowUp) {
    std::cerr << tr.diagnostic << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_optimize(const std::string& path, const CommonOpts& c) {
  ScenarioFileModel m = load_model(path, c);
  OptimizationProblem prob = build_problem(m);
  ValidationReport rep = validate_scenario(prob.base);
  if (!rep.valid) {
    std::cerr << rep.to_string();
    return kExitValidation;
  }
  const int threads = env_threads(m.solver.threads);
  SolveResult res = solve(prob, m.optimize.budget, m.optimize.seed, threads);
  fs::path out = prepare_out(c.out_dir, path);
  {
    std::ofstream f(out / "resolved.scn", std::ios::binary);
    f << serialize_scenario(m);
  }
  write_history_csv((out / "history.csv").string(), res.history);
  write_control_csv((out / "best_control.csv").string(), res.best, prob.bins,
                    res.best_cost, res.best_effect, res.feasible);
  if (!c.quiet) {
    std::cout << (res.feasible ? "best feasible" : "least violating")
              << " control: cost = " << res.best_cost << ", effect = " << res.best_effect
              << " (" << res.history.size() << " evaluations)\n";
    std::cout << "outputs in " << out.string() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const CommonOpts& c) {
  struct Row {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Row> rows;
  auto add = [&](std::string name, bool pass, std::string detail) {
    rows.push_back({std::move(name), pass, std::move(detail)});
  };

  {
    auto tc = transport_case(
        [](double x) { return (x >= 1.0 && x <= 2.0) ? 1.0 : 0.0; });
    OracleRun r = run_oracle(tc, 6.0, 50, 0.5);
    add("transport exactness", r.rel_linf_err < 1e-12,
        "rel Linf err = " + std::to_string(r.rel_linf_err));
  }
  {
    auto dc = decay_case(1.0, [](double x) { return (x >= 1.0 && x <= 2.0) ? 1.0 : 0.0; });
    OracleRun r = run_oracle(dc, 6.0, 200, 0.5);
    add("decay accuracy", r.rel_linf_err < 1e-6,
        "rel Linf err = " + std::to_string(r.rel_linf_err));
  }
  {
    OracleRun r = run_oracle(blowup_case(), 20.0, 400, 0.5);
    const bool ok = r.rel_linf_err < 1e-3;
    add("self-amplifying accuracy", ok, "rel Linf err = " + std::to_string(r.rel_linf_err));
    OracleRun r6 = run_oracle(blowup_case(), 20.0, 400, 0.6);
    add("self-amplifying mass", std::abs(r6.l1_value - r6.l1_exact) < 5e-3,
        "|mass - exact| = " + std::to_string(std::abs(r6.l1_value - r6.l1_exact)));
    OracleRun det = run_oracle(blowup_case(), 20.0, 400, 0.75);
    const bool blew = det.solution.status == TerminationStatus::BlowUp;
    const double tb = det.solution.end_time;
    add("blow-up detection", blew && tb >= 0.66 && tb <= 0.70,
        "flagged at t = " + std::to_string(tb));
  }

  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    if (!c.quiet)
      std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail
                << ")\n";
  }
  return all ? kExitOk : kExitValidation;
}

int cmd_convergence(const std::string& path, const CommonOpts& c) {
  ScenarioFileModel m = load_model(path, c);
  auto run_at = [&](int cells) {
    ScenarioFileModel mm = m;
    mm.grid.cells_per_unit_age = cells;
    Scenario sc = build_scenario(mm);
    return std::pair<Scenario, Trajectory>(sc, simulate(sc));
  };
  const int r0 = m.grid.cells_per_unit_age;
  std::vector<double> errs;
  for (int mult : {1, 2, 4}) {
    auto [sc_c, tr_c] = run_at(r0 * mult);
    auto [sc_f, tr_f] = run_at(r0 * mult * 4);
    const SIRState& a = tr_c.states.back();
    const SIRState& b = tr_f.states.back();
    double err = l1_distance(a.S.refined(sc_f.grid), b.S) +
                 l1_distance(a.I.refined(sc_f.grid), b.I) +
                 l1_distance(a.R.refined(sc_f.grid), b.R);
    errs.push_back(err);
    if (!c.quiet)
      std::cout << "cells/unit = " << r0 * mult << "  L1 error vs 4x = " << err << "\n";
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double ratio = errs[i] / std::max(errs[i + 1], 1e-300);
    if (!c.quiet)
      std::cout << "halving " << i + 1 << ": error ratio = " << ratio
                << " (observed order " << std::log2(ratio) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"age-structured SIR solver with vaccination control"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--tol", common.tol, "override solver tolerance");
  auto* seed_opt = app.add_option("--seed", common.seed, "override optimizer seed");
  app.add_flag("--quiet", common.quiet, "suppress console output");

  std::string sim_file, opt_file, conv_file, check_file;
  auto* sim = app.add_subcommand("simulate", "run a scenario and write CSV outputs");
  sim->add_option("file", sim_file, "scenario file")->required();
  auto* opt = app.add_subcommand("optimize", "search for the best vaccination control");
  opt->add_option("file", opt_file, "scenario file")->required();
  auto* val = app.add_subcommand("validate", "run the analytic oracle suite");
  auto* conv = app.add_subcommand("convergence", "run a refinement ladder");
  conv->add_option("file", conv_file, "scenario file")->required();
  auto* chk = app.add_subcommand("check", "validate a scenario file only");
  chk->add_option("file", check_file, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);
  common.seed_set = seed_opt->count() > 0;

  try {
    if (sim->parsed()) return cmd_simulate(sim_file, common);
    if (opt->parsed()) return cmd_optimize(opt_file, common);
    if (val->parsed()) return cmd_validate(common);
    if (conv->parsed()) return cmd_convergence(conv_file, common);
    if (chk->parsed()) return cmd_check(check_file, common);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const HypothesisViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

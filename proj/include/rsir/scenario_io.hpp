#ifndef RSIR_SCENARIO_IO_HPP
#define RSIR_SCENARIO_IO_HPP

#include <string>
#include <vector>

#include "rsir/optimizer.hpp"
#include "rsir/sir_model.hpp"

namespace rsir {

/// Breakpoint table "k:v k:v ..." from the scenario file.
struct TableData {
  std::vector<double> keys, values;
  bool operator==(const TableData&) const = default;
};

struct GridModel {
  double age_max = 10.0;
  int cells_per_unit_age = 8;
  double horizon = 5.0;
  bool operator==(const GridModel&) const = default;
};

struct KernelModel {
  std::string form = "constant";  // constant | separable | tabulated
  double value = 0.0;             // constant
  double scale = 1.0;             // separable: scale * phi(a) * psi(a')
  TableData phi, psi;
  std::vector<double> ages, ages_prime;  // tabulated (bilinear)
  std::vector<std::vector<double>> rows;
  double lambda_inf = 0.0, lambda_lip = 0.0;
  bool operator==(const KernelModel&) const = default;
};

struct RateModel {
  std::string form = "constant";  // constant | table | product
  double value = 0.0;
  TableData age_table;               // table: linear in age, time-independent
  TableData time_factor, age_factor;  // product: f(t) g(a), both linear
  bool operator==(const RateModel&) const = default;
};

struct RatesModel {
  RateModel d_S, d_I, d_R, r_I;
  double rate_lip = 0.0, rate_l1 = 0.0, rate_inf = 0.0;
  bool operator==(const RatesModel&) const = default;
};

struct CurveModel {
  std::string form = "zero";  // zero | constant | table
  double value = 0.0;
  TableData table;
  bool operator==(const CurveModel&) const = default;
};

struct PolicyModel {
  std::string variant = "none";  // none | age | time
  std::vector<double> ages, times;
  std::vector<TableData> controls;  // eta_j (pc in time) or nu_k (pc in age)
  bool operator==(const PolicyModel&) const = default;
};

struct SolverModel {
  double solver_tol = 1e-8;
  double fp_tol = 1e-10;
  double pos_tol = 1e-12;
  int max_iter = 100;
  double window_initial = 0.5;
  double blowup_factor = 1e8;
  bool allow_signed_rates = false;
  int output_stride = 1;
  int threads = 0;
  bool operator==(const SolverModel&) const = default;
};

struct OptimizeModel {
  std::string direction = "min_effect";  // min_cost | min_effect
  double cap = 0.0;
  std::string cost_variant = "age_susceptible";
  int bins = 1;
  int budget = 100;
  std::uint64_t seed = 0;
  bool operator==(const OptimizeModel&) const = default;
};

/// Fully resolved scenario file: parsing is total, every field present or
/// defaulted, unknown keys rejected.
struct ScenarioFileModel {
  GridModel grid;
  KernelModel kernel;
  RatesModel rates;
  CurveModel S_o, I_o, R_o, S_b, I_b, R_b;
  PolicyModel policy;
  SolverModel solver;
  OptimizeModel optimize;
  bool operator==(const ScenarioFileModel&) const = default;
};

ScenarioFileModel parse_scenario_text(const std::string& text,
                                      const std::string& source_name);
ScenarioFileModel parse_scenario_file(const std::string& path);

/// Serialize with every field explicit at full precision; re-parsing yields
/// an identical model.
std::string serialize_scenario(const ScenarioFileModel& m);

/// Materialize grid, data, kernel, rates and policy.
Scenario build_scenario(const ScenarioFileModel& m);

/// Parse + build in one step.
Scenario parse_scenario(const std::string& path);

OptimizationProblem build_problem(const ScenarioFileModel& m);

/// --- CSV output (17 significant digits, fixed schemas) ---

void write_trajectory_csv(const std::string& path, const Trajectory& tr, int stride);
void write_summary_csv(const std::string& path, const Trajectory& tr);
void write_profile_csv(const std::string& path, const SIRState& s);
void write_history_csv(const std::string& path, const std::vector<EvalRecord>& history);
void write_control_csv(const std::string& path, const ControlVector& best, int bins,
                       double best_cost, double best_effect, bool feasible);

}  // namespace rsir

#endif

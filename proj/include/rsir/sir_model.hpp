#ifndef RSIR_SIR_MODEL_HPP
#define RSIR_SIR_MODEL_HPP

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rsir/coupled_ibvp.hpp"
#include "rsir/grid.hpp"
#include "rsir/time_series.hpp"

namespace rsir {

/// Contact kernel lambda(a, a') with its declared sup+TV and Lipschitz
/// constants. Separable kernels carry their factors so the infection
/// pressure can be evaluated in O(nodes) instead of O(nodes^2).
struct Kernel {
  std::function<double(double, double)> lambda = [](double, double) { return 0.0; };
  bool separable = false;
  std::function<double(double)> phi, psi;  // lambda = phi(a) psi(a') when separable
  double Lambda_inf = 0.0;
  double Lambda_L = 0.0;
};

struct Rates {
  std::function<double(double, double)> d_S = [](double, double) { return 0.0; };
  std::function<double(double, double)> d_I = [](double, double) { return 0.0; };
  std::function<double(double, double)> d_R = [](double, double) { return 0.0; };
  std::function<double(double, double)> r_I = [](double, double) { return 0.0; };
  double R_L = 0.0, R_1 = 0.0, R_inf = 0.0;
};

/// Vaccination at fixed ages: fraction eta_j(t) of S crossing age a_j is
/// immunized (S and R jump across the interface, I passes through).
struct AgeTriggeredPolicy {
  std::vector<double> ages;        // must equal the grid's interior interfaces
  std::vector<TimeSeries> eta;     // values in [0, 1]
};

/// Vaccination campaigns at fixed times: fraction nu_k(a) of S is moved to R
/// at time t_k (instantaneous, algebraic restart).
struct TimeTriggeredPolicy {
  std::vector<double> times;
  std::vector<std::function<double(double)>> nu;  // values in [0, 1]
};

using VaccinationPolicy = std::variant<AgeTriggeredPolicy, TimeTriggeredPolicy>;

struct SolverConfig {
  double solver_tol = 1e-8;
  double fp_tol = 1e-10;
  double pos_tol = 1e-12;
  int max_iter = 100;
  double window_initial = 0.5;
  double blowup_factor = 1e8;
  bool allow_signed_rates = false;
  int output_stride = 1;
  int threads = 0;
};

struct Scenario {
  std::shared_ptr<const Grid> grid;
  Kernel kernel;
  Rates rates;
  VaccinationPolicy policy = AgeTriggeredPolicy{};
  GridFunction S_o, I_o, R_o;
  TimeSeries S_b, I_b, R_b;
  SolverConfig config;
};

struct ValidationIssue {
  bool error = false;  // false: warning
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid = true;         // no errors
  bool pos_eligible = true;  // nonnegative data and boundary
  bool neg_eligible = true;  // nonnegative rates and kernel

  std::string to_string() const;
};

/// Sampled verification of every declared constant, data signs, control
/// ranges and grid alignment. Never throws; everything lands in the report.
ValidationReport validate_scenario(const Scenario& sc);

/// Component layout of the segment-shifted reformulation: component
/// 3 j + c (c = 0 S, 1 I, 2 R) lives on segment j with ages shifted by the
/// segment start.
struct SirSystem {
  SystemSpec spec;
  std::shared_ptr<const Grid> grid;

  SystemState pack(const SIRState& s) const;
  SIRState unpack(const SystemState& s, double time) const;
};

/// Reformulate an age-triggered scenario as one coupled system with
/// vaccination jumps realized by the interface boundary rules.
SirSystem build_system_age_triggered(const Scenario& sc);

struct TimeTriggeredPlan {
  SirSystem system;                          // shared by every interval
  std::vector<double> jump_times;            // strictly increasing, in (0, T)
  std::vector<std::vector<double>> nu_nodes; // per jump, sampled on the grid layout
};

/// Reformulate a time-triggered scenario: one system reused on every
/// inter-jump interval plus the algebraic restart data.
TimeTriggeredPlan build_system_time_triggered(const Scenario& sc);

/// Apply the time-triggered jump in place: S <- (1-nu) S, R <- R + nu S.
void apply_time_jump(SIRState& s, std::span<const double> nu_nodes);

struct Trajectory {
  std::shared_ptr<const Grid> grid;
  std::vector<SIRState> states;  // one per time step from t = 0
  std::vector<std::pair<double, SIRState>> prejump;  // time-triggered snapshots
  std::vector<FixedPointReport> windows;
  TerminationStatus status = TerminationStatus::Completed;
  double end_time = 0;
  std::string diagnostic;

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// Validate, assemble, run the fixed-point solver over the horizon and map
/// the components back to (S, I, R).
Trajectory simulate(const Scenario& sc);

}  // namespace rsir

#endif

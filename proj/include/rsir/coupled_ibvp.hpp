#ifndef RSIR_COUPLED_IBVP_HPP
#define RSIR_COUPLED_IBVP_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rsir/report.hpp"
#include "rsir/scalar_renewal.hpp"

namespace rsir {

/// One frozen time slice of the full n-component state.
using StateSlice = std::vector<std::span<const double>>;

/// Nonlocal coupling evaluated in the combined form the frozen solves need:
/// for each component i, the diagonal field (alpha_i[w])_i and the summed
/// off-diagonal source sum_{j != i} (alpha_i[w])_j w_j, on component i's mesh.
struct AlphaApplied {
  std::vector<std::vector<double>> diag;    // [i][node]
  std::vector<std::vector<double>> source;  // [i][node]
};
using AlphaEvaluator = std::function<void(const StateSlice&, AlphaApplied&)>;

struct ComponentMesh {
  int nodes = 0;
  double h = 0;
  int trace_node = 0;  // node index of the trace location x_bar (left limit)
  int group = 0;       // components sharing a group live on the same age range
};

/// Boundary rule b_i(t) = beta_i(t, traces of listed components). Triangular:
/// every dependency index must be smaller than the component's own index.
struct BoundaryRule {
  std::vector<int> deps;
  std::function<double(double, std::span<const double>)> flux;
};

struct ComponentSpeed {
  std::function<double(double, double)> g = [](double, double) { return 1.0; };
  std::function<double(double, double)> dg_dx = [](double, double) { return 0.0; };
  double lower = 1.0, upper = 1.0;
  bool unit = true;
};

struct SystemConstants {
  double A_L = 0, A_1 = 0, A_2 = 0;       // nonlocal operator bounds
  double C_L = 0, C_inf = 0;              // gamma bounds
  double B_1 = 0, B_inf = 0, B_L = 0;     // boundary bounds
  double G_1 = 0, G_inf = 0;              // speed bounds
  double g_lower = 1.0, g_upper = 1.0;
};

/// The coupled nonlocal IBVP in its freeze-and-solve decomposition.
struct SystemSpec {
  int n = 0;
  double dt = 0;
  std::vector<ComponentMesh> meshes;
  AlphaEvaluator alpha;  // may be null when there is no nonlocal coupling
  std::vector<std::function<double(double, double)>> gamma_diag;
  std::vector<std::vector<std::pair<int, std::function<double(double, double)>>>>
      gamma_off;
  std::vector<BoundaryRule> beta;
  std::vector<ComponentSpeed> speeds;
  SystemConstants constants;
  bool pos_declared = false;  // nonnegative data and boundary
  bool neg_declared = false;  // dissipative coupling
  bool eq_declared = true;    // equal speeds

  void validate() const;  // shapes and triangularity
};

struct SystemState {
  std::vector<std::vector<double>> comp;  // comp[i][node]

  double l1_total(double h) const;
  double linf() const;
};

/// Dense n-component solution on one contiguous range of time steps.
struct SystemTrajectory {
  double t_start = 0;
  double dt = 0;
  std::vector<std::vector<std::vector<double>>> comp;  // [i][k][node]

  int steps() const { return comp.empty() ? 0 : static_cast<int>(comp[0].size()) - 1; }
  double time(int k) const { return t_start + k * dt; }
  SystemState state_at(int k) const;
  StateSlice slice(int k) const;
};

struct FixedPointReport {
  double t_start = 0, t_end = 0;
  int iterations = 0;    // productive updates (moves of at least fp_tol)
  int applications = 0;  // total applications of the map
  std::vector<double> distances;  // d_X between successive iterates
  std::vector<double> ratios;     // successive quotients above the noise floor
  bool converged = false;
  double measured_ratio = 0;      // max of ratios (0 when none)
  double k1_bound = 0, kinf_bound = 0;  // ball constants used (2x lower bounds)
  double max_l1 = 0, max_linf = 0, max_tv = 0;
  bool in_ball = false;
};

struct FixedPointOptions {
  double fp_tol = 1e-10;        // on d_X, relative to max(1, K1)
  int max_iter = 100;
  double window_initial = 0.5;  // time units
  double blowup_factor = 1e8;   // threshold = factor * (initial sup + 1)
  double solver_tol = 1e-8;
  double pos_tol = 1e-12;
};

/// One application of the freeze-and-solve map on a window: solves the n
/// decoupled scalar problems with coefficients frozen at w, in index order so
/// each boundary rule consumes already-updated traces.
SystemTrajectory apply_T(const SystemSpec& spec, const SystemTrajectory& w,
                         const SystemState& u0);

/// Picard iteration of apply_T from the constant-in-time extension of u0.
std::pair<SystemTrajectory, FixedPointReport> solve_window(
    const SystemSpec& spec, const SystemState& u0, double t_start, int steps,
    const FixedPointOptions& opts = {});

enum class TerminationStatus { Completed, BlowUp };

struct GlobalSolution {
  SystemTrajectory traj;
  std::vector<FixedPointReport> windows;
  TerminationStatus status = TerminationStatus::Completed;
  double end_time = 0;      // last time with valid data
  std::string diagnostic;
};

/// Chain adaptive windows over [0, t_end]: halve on non-convergence or
/// measured ratio > 1/2 (never below one step), double after two consecutive
/// quick windows. Blow-up evidence (threshold crossing, or Picard collapse at
/// the minimal window) terminates with a partial solution unless the
/// dissipativity conditions were declared, in which case it is a hard error.
GlobalSolution solve_global(const SystemSpec& spec, const SystemState& u0,
                            double t_start, double t_end,
                            const FixedPointOptions& opts = {});

/// Pointwise dissipativity test: max over nodes of
/// sum_i (alpha_i[u](x) + gamma_i(t,x)) . u(x), summed within mesh groups.
InequalityReport check_neg_condition(const SystemSpec& spec, const SystemState& u,
                                     double t);

/// Lipschitz dependence on data: compares two global runs (same system
/// shape, possibly different initial data and boundary rules) against the
/// assembled Gronwall constant.
InequalityReport check_solution_stability(const SystemSpec& specA,
                                          const GlobalSolution& runA,
                                          const SystemSpec& specB,
                                          const GlobalSolution& runB);

/// Ball constants: twice the lower bounds required of K1, Kinf.
std::pair<double, double> ball_constants(const SystemSpec& spec, const SystemState& u0);

/// Metric of the iteration space: max over components of the sup-in-time L1
/// distance.
double dx_distance(const SystemTrajectory& a, const SystemTrajectory& b);

}  // namespace rsir

#endif

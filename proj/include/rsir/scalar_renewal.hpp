#ifndef RSIR_SCALAR_RENEWAL_HPP
#define RSIR_SCALAR_RENEWAL_HPP

#include <functional>
#include <optional>
#include <vector>

#include "rsir/grid.hpp"
#include "rsir/report.hpp"
#include "rsir/time_series.hpp"

namespace rsir {

/// Coefficients of the scalar problem
///   du/dt + d(g u)/dx + m u = f,   u(0,.) = u_o,   g(t,0) u(t,0+) = b(t),
/// together with the declared constants of the hypotheses they must satisfy:
///   g in [g_lower, g_upper],   ||dx g||_inf + tv(dx g)        <= G1,
///   tv(g(t,.)) + tv(g(.,x))                                    <= Ginf,
///   ||m(t,.)||_inf + tv(m(t,.))                                <= M,
///   ||f(t,.)||_L1 <= F1,   ||f(t,.)||_inf + tv(f(t,.))         <= Finf.
/// The constants are declared by the caller and spot-checked by sampling.
struct Coefficients {
  std::function<double(double, double)> g = [](double, double) { return 1.0; };
  std::function<double(double, double)> dg_dx = [](double, double) { return 0.0; };
  double g_lower = 1.0;
  double g_upper = 1.0;
  bool unit_speed = true;  // exact g == 1 (enables the node-aligned fast path)

  std::function<double(double, double)> m = [](double, double) { return 0.0; };
  std::function<double(double, double)> f = [](double, double) { return 0.0; };
  TimeSeries b;  // boundary flux g(t,0) u(t,0+)

  double F1 = 0.0, Finf = 0.0, G1 = 0.0, Ginf = 0.0, M = 0.0;
};

/// Forward characteristic through (t0, x0), sampled at fixed steps.
struct CharacteristicTrace {
  double t0 = 0.0, x0 = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
  bool truncated = false;  // left [0, age_max] before t_end

  double position_at(double t) const;  // linear interpolation
};

/// Integrate dx/dt = g(t,x) from (t0, x0) to t_end with classical RK4 at
/// fixed step dt (shorter final step). Truncates with a flag if the curve
/// leaves [0, age_max].
CharacteristicTrace trace_forward(const Coefficients& c, double t0, double x0,
                                  double t_end, double dt, double age_max);

/// sigma(t) = X(t; 0, 0), the datum/boundary separating characteristic.
double sigma_curve(const Coefficients& c, double t, double dt, double age_max);

/// Entry time T(0; t, x) of the backward characteristic through (t, x) on
/// the boundary x = 0. Requires x < sigma(t) (strictly: points on the curve
/// count as datum side); found by bisection on s -> X(t; s, 0) - x to 1e-12.
double trace_backward_entry_time(const Coefficients& c, double t, double x,
                                 double dt, double age_max);

/// E(tau, t, x) = exp(-integral_tau^t (m + dx g)(s, X(s; t, x)) ds), by
/// trapezoid quadrature along the traced characteristic.
double exponential_weight(const Coefficients& c, double tau, double t, double x,
                          double dt, double age_max);

struct ScalarSolveOptions {
  double solver_tol = 1e-8;
  double pos_tol = 1e-12;
  bool verify_constants = true;   // spot-check declared constants; throw on violation
  double hypothesis_slack = 1e-9; // relative slack for the spot checks
};

/// Dense output of one scalar solve on [t_start, t_end]: nodal values at
/// every time step on a single-segment mesh of `nodes` nodes, spacing h.
struct ScalarSolution {
  double t_start = 0.0;
  double h = 0.0;
  int nodes = 0;
  std::vector<std::vector<double>> values;  // values[k][i], k = 0..steps

  int steps() const { return static_cast<int>(values.size()) - 1; }
  double time(int k) const { return t_start + k * h; }
  double l1(int k) const;
  double linf(int k) const;
  double tv(int k) const;
  double l1_distance_at(int k, const ScalarSolution& other) const;
};

/// Solve the scalar problem on [t_start, t_end] by the two-branch
/// characteristic formula (datum branch for x > sigma, boundary branch
/// below), with trapezoid quadrature of the exponential weight and of the
/// f-term along traced characteristics. The grid must be single-segment and
/// t_end - t_start a whole number of steps.
ScalarSolution solve_scalar(const Coefficients& c, const GridFunction& u0,
                            double t_start, double t_end,
                            const ScalarSolveOptions& opts = {});

/// Low-level engine used by solve_scalar and the coupled driver: plain nodal
/// vectors, per-index coefficient evaluation. For unit speed it marches along
/// the node-aligned characteristics; otherwise every node is traced
/// backwards. Nodes exactly on the separating characteristic store the mean
/// of the two one-sided branch values (the L1-correct representative; the
/// marching itself carries the exact one-sided values).
struct ScalarEngineInput {
  int nodes = 0;
  double h = 0.0;
  double t_start = 0.0;
  int steps = 0;
  // mu = m + dx g and f sampled at (time node k, age node i)
  std::function<double(int, int)> mu_at;
  std::function<double(int, int)> f_at;
  std::function<double(int)> boundary_density;  // b(t_k) / g(t_k, 0)
  std::span<const double> u0;
  // generic-speed path only:
  const Coefficients* coeffs = nullptr;
  bool unit_speed = true;
};

std::vector<std::vector<double>> scalar_march(const ScalarEngineInput& in);

/// --- runtime-checkable inequalities on completed solves ---

/// A-priori sup bounds and the explicit total-variation bound, at every
/// output time.
std::vector<InequalityReport> check_apriori_bounds(const Coefficients& c,
                                                   const GridFunction& u0,
                                                   const ScalarSolution& sol);

/// Comparison principle: ordered data imply ordered solutions (nodewise,
/// tolerance 1e-10). Preconditions on the input ordering are verified.
InequalityReport check_monotonicity(const Coefficients& c_lo, const GridFunction& u0_lo,
                                    const ScalarSolution& lo,
                                    const Coefficients& c_hi, const GridFunction& u0_hi,
                                    const ScalarSolution& hi);

/// L1 stability in (u_o, f, b, m) with the explicit constant, plus the
/// boundary-trace stability at a fixed age xbar > sigma(t) when requested.
struct StabilityPair {
  const Coefficients* c1;
  const GridFunction* u01;
  const ScalarSolution* s1;
  const Coefficients* c2;
  const GridFunction* u02;
  const ScalarSolution* s2;
};
std::vector<InequalityReport> check_data_stability(const StabilityPair& p,
                                                   std::optional<double> xbar = {});

}  // namespace rsir

#endif

#ifndef RSIR_ORACLES_HPP
#define RSIR_ORACLES_HPP

#include <functional>
#include <string>

#include "rsir/coupled_ibvp.hpp"
#include "rsir/grid.hpp"

namespace rsir {

/// A problem with a known closed-form solution, used to validate the solver
/// stack end to end.
struct AnalyticCase {
  std::string name;
  std::function<double(double, double)> closed_form;   // (t, x) -> value
  std::function<bool(double, double)> valid_region;    // where the form applies
  std::function<double(double)> l1_norm;               // exact ||u(t)||_L1, if known
  double horizon_hint = 0.0;                           // sensible t_end for checks

  // solver-side realization
  std::function<SystemSpec(const Grid&)> make_spec;
  std::function<double(double)> initial;  // u_o(x)
};

/// Self-amplifying case whose mass obeys M' = 2 M^2 - M: the exact solution
/// is e^{t-x} / (2 - e^t) above the separating characteristic and 0 below,
/// with L1 norm 1/(2 - e^t) diverging at t = ln 2.
AnalyticCase blowup_case();

/// Pure transport: u(t, x) = u_o(x - t) for x > t, zero inflow.
AnalyticCase transport_case(std::function<double(double)> u0);

/// Transport with constant decay mu: u(t, x) = u_o(x - t) e^{-mu t} above
/// the separating characteristic.
AnalyticCase decay_case(double mu, std::function<double(double)> u0);

/// Run one analytic case through the coupled solver and compare against the
/// closed form at time t_check.
struct OracleRun {
  double rel_linf_err = 0.0;   // sup-norm relative error on the valid region
  double l1_value = 0.0;       // computed L1 norm at t_check
  double l1_exact = 0.0;       // closed-form L1 norm, when the case knows it
  GlobalSolution solution;
};
OracleRun run_oracle(const AnalyticCase& c, double age_max, int cells_per_unit,
                     double t_check, const FixedPointOptions& opts = {});

}  // namespace rsir

#endif

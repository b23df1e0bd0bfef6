#ifndef RSIR_BV_TOOLKIT_HPP
#define RSIR_BV_TOOLKIT_HPP

#include <functional>
#include <vector>

#include "rsir/grid.hpp"
#include "rsir/report.hpp"

namespace rsir {

/// Discrete analogues of the elementary BV estimates. Each checker evaluates
/// both sides on the given grid functions and reports; for nodal
/// piecewise-linear representatives the inequalities hold up to rounding.

/// tv(u w) <= tv(u) ||w||_inf + ||u||_inf tv(w)
InequalityReport check_tv_product(const GridFunction& u, const GridFunction& w);

/// tv(phi o u) <= Lip(phi) tv(u)
InequalityReport check_tv_composition(const GridFunction& u,
                                      const std::function<double(double)>& phi,
                                      double lipschitz);

/// tv(u / w) <= tv(u)/w_min + tv(w) ||u||_inf / w_min^2, for w >= w_min > 0
InequalityReport check_tv_quotient(const GridFunction& u, const GridFunction& w);

/// tv(integral_0^t u(tau, .) dtau) <= integral_0^t tv(u(tau)) dtau
/// (trapezoid in tau over equally spaced slices)
InequalityReport check_tv_time_integral(const std::vector<GridFunction>& slices,
                                        double dtau);

/// integral |u(x + delta(x)) - u(x)| dx <= tv(u) ||delta||_inf
/// delta given nodewise as nonnegative whole numbers of cells.
InequalityReport check_tv_shift(const GridFunction& u,
                                const std::vector<int>& shift_cells);

/// Sampled bivariate function on a uniform square time grid [0, tmax]^2:
/// value(i, j) = u(tau_i, t_j).
struct BivariateSample {
  int n = 0;       // nodes per axis
  double dt = 0;   // spacing; tmax = (n-1) dt
  std::vector<double> values;  // row-major, tau index major

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// With U(t) = integral_0^t u(tau, t) dtau:
/// tv(U) <= ||u||_inf tmax + integral tv(u(tau, .)) dtau
InequalityReport check_incubo(const BivariateSample& u);

}  // namespace rsir

#endif

#include "rsir/bv_toolkit.hpp"

#include <cmath>
#include <stdexcept>

namespace rsir {

namespace {
constexpr double kTol = 1e-12;

void require_same_grid(const GridFunction& u, const GridFunction& w, const char* who) {
  if (!(u.grid() == w.grid())) throw std::invalid_argument(std::string(who) + ": grids differ");
}

GridFunction map_values(const GridFunction& u,
                        const std::function<double(double)>& f) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x = f(x);
  return GridFunction(u.grid_ptr(), std::move(v));
}
}  // namespace

InequalityReport check_tv_product(const GridFunction& u, const GridFunction& w) {
  require_same_grid(u, w, "check_tv_product");
  std::vector<double> prod(u.values().size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = u[i] * w[i];
  GridFunction uw(u.grid_ptr(), std::move(prod));
  double lhs = uw.tv();
  double rhs = u.tv() * w.linf() + u.linf() * w.tv();
  return make_report("tv_product", lhs, rhs, kTol);
}

InequalityReport check_tv_composition(const GridFunction& u,
                                      const std::function<double(double)>& phi,
                                      double lipschitz) {
  GridFunction fu = map_values(u, phi);
  return make_report("tv_composition", fu.tv(), lipschitz * u.tv(), kTol);
}

InequalityReport check_tv_quotient(const GridFunction& u, const GridFunction& w) {
  require_same_grid(u, w, "check_tv_quotient");
  double wmin = w.min_value();
  if (wmin <= 0) throw std::invalid_argument("check_tv_quotient: w must be bounded away from 0");
  std::vector<double> q(u.values().size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = u[i] / w[i];
  GridFunction uq(u.grid_ptr(), std::move(q));
  double rhs = u.tv() / wmin + w.tv() * u.linf() / (wmin * wmin);
  return make_report("tv_quotient", uq.tv(), rhs, kTol);
}

InequalityReport check_tv_time_integral(const std::vector<GridFunction>& slices,
                                        double dtau) {
  if (slices.empty()) throw std::invalid_argument("check_tv_time_integral: no slices");
  auto grid = slices.front().grid_ptr();
  std::vector<double> acc(grid->total_nodes(), 0.0);
  double rhs = 0.0;
  for (std::size_t k = 0; k < slices.size(); ++k) {
    double wgt = (k == 0 || k + 1 == slices.size()) ? 0.5 * dtau : dtau;
    auto v = slices[k].values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += wgt * v[i];
    rhs += wgt * slices[k].tv();
  }
  GridFunction U(grid, std::move(acc));
  return make_report("tv_time_integral", U.tv(), rhs, kTol * slices.size());
}

InequalityReport check_tv_shift(const GridFunction& u,
                                const std::vector<int>& shift_cells) {
  // single-segment mesh; shifted samples clamp to the last node
  if (u.grid().segments() != 1)
    throw std::invalid_argument("check_tv_shift: single-segment grids only");
  auto v = u.values();
  const int n = static_cast<int>(v.size());
  if (static_cast<int>(shift_cells.size()) != n)
    throw std::invalid_argument("check_tv_shift: shift size mismatch");
  const double h = u.grid().cell_width();
  int max_shift = 0;
  std::vector<double> diff(v.size());
  for (int i = 0; i < n; ++i) {
    if (shift_cells[i] < 0) throw std::invalid_argument("check_tv_shift: shifts must be >= 0");
    max_shift = std::max(max_shift, shift_cells[i]);
    int k = std::min(n - 1, i + shift_cells[i]);
    diff[i] = std::abs(v[k] - v[i]);
  }
  GridFunction d(u.grid_ptr(), std::move(diff));
  return make_report("tv_shift", d.integral(), u.tv() * (max_shift * h), kTol);
}

InequalityReport check_incubo(const BivariateSample& u) {
  if (u.n < 2) throw std::invalid_argument("check_incubo: need at least two nodes");
  const int n = u.n;
  const double dt = u.dt, tmax = (n - 1) * dt;

  auto trapz_tau = [&](int j, int upto) {
    // integral over tau in [0, t_upto] of u(tau, t_j)
    double acc = 0.0;
    for (int i = 0; i + 1 <= upto; ++i) acc += 0.5 * dt * (u.at(i, j) + u.at(i + 1, j));
    return acc;
  };

  double lhs = 0.0;
  for (int j = 0; j + 1 < n; ++j)
    lhs += std::abs(trapz_tau(j + 1, j + 1) - trapz_tau(j, j));

  double sup = 0.0;
  for (double v : u.values) sup = std::max(sup, std::abs(v));

  double rhs = sup * tmax;
  for (int i = 0; i < n; ++i) {
    double tv_row = 0.0;
    for (int j = 0; j + 1 < n; ++j) tv_row += std::abs(u.at(i, j + 1) - u.at(i, j));
    double wgt = (i == 0 || i + 1 == n) ? 0.5 * dt : dt;
    rhs += wgt * tv_row;
  }
  return make_report("incubo", lhs, rhs, kTol * n);
}

}  // namespace rsir

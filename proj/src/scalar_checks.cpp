#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsir/scalar_renewal.hpp"

namespace rsir {

namespace {

double safe_exp(double x) {
  return x > 700 ? std::numeric_limits<double>::infinity() : std::exp(x);
}

}  // namespace

std::vector<InequalityReport> check_apriori_bounds(const Coefficients& c,
                                                   const GridFunction& u0,
                                                   const ScalarSolution& sol) {
  std::vector<InequalityReport> out;
  const double u0_linf = u0.linf(), u0_l1 = u0.l1(), u0_tv = u0.tv();
  const double gch = c.g_lower;
  double run_linf = 0.0, run_l1 = 0.0;
  double worst_linf = -1e300, worst_l1 = -1e300, worst_tv = -1e300;
  InequalityReport r_linf, r_l1, r_tv;
  for (int k = 0; k <= sol.steps(); ++k) {
    const double t = k * sol.h;
    const double t_abs0 = sol.t_start, t_abs = sol.time(k);
    run_linf = std::max(run_linf, sol.linf(k));
    run_l1 = std::max(run_l1, sol.l1(k));
    const double b_sup = c.b.sup(t_abs0, t_abs);
    const double b_l1 = c.b.l1(t_abs0, t_abs);
    const double b_tv = c.b.tv(t_abs0, t_abs);
    const double e_gm = safe_exp((c.G1 + c.M) * t);

    double rhs_linf = (u0_linf + b_sup / gch + c.Finf * t) * e_gm;
    double rhs_l1 = (u0_l1 + b_l1 + c.F1 * t) * safe_exp(c.M * t);
    double rhs_tv = ((2.0 + c.Ginf / gch + (c.G1 + c.M) * t) * b_sup / gch +
                     b_tv / gch + ((c.G1 + c.M) * t + 5.0) * c.Finf * t +
                     (2.0 + (c.G1 + c.M) * t) * u0_linf + u0_tv) *
                    e_gm;

    auto upd = [&](double lhs, double rhs, double& worst, InequalityReport& rep,
                   const char* name) {
      double margin = lhs - rhs;
      if (margin > worst) {
        worst = margin;
        rep = make_report(name, lhs, rhs, 1e-9 * (1.0 + std::abs(rhs)),
                          "t = " + std::to_string(t));
      }
    };
    upd(run_linf, rhs_linf, worst_linf, r_linf, "apriori_sup");
    upd(run_l1, rhs_l1, worst_l1, r_l1, "apriori_l1");
    upd(sol.tv(k), rhs_tv, worst_tv, r_tv, "apriori_tv");
  }
  out.push_back(r_linf);
  out.push_back(r_l1);
  out.push_back(r_tv);
  return out;
}

InequalityReport check_monotonicity(const Coefficients& c_lo, const GridFunction& u0_lo,
                                    const ScalarSolution& lo,
                                    const Coefficients& c_hi, const GridFunction& u0_hi,
                                    const ScalarSolution& hi) {
  if (lo.nodes != hi.nodes || lo.steps() != hi.steps())
    throw std::invalid_argument("check_monotonicity: shape mismatch");
  const double tol_in = 1e-12;
  for (int i = 0; i < lo.nodes; ++i)
    if (u0_lo[i] > u0_hi[i] + tol_in)
      throw std::invalid_argument("check_monotonicity: initial data not ordered");
  for (int k = 0; k <= lo.steps(); ++k) {
    const double t = lo.time(k);
    if (c_lo.b(t) > c_hi.b(t) + tol_in)
      throw std::invalid_argument("check_monotonicity: boundary data not ordered");
    for (int i = 0; i < lo.nodes; ++i) {
      const double x = i * lo.h;
      if (c_lo.f(t, x) > c_hi.f(t, x) + tol_in)
        throw std::invalid_argument("check_monotonicity: sources not ordered");
    }
  }
  double worst = -1e300;
  for (int k = 0; k <= lo.steps(); ++k)
    for (int i = 0; i < lo.nodes; ++i)
      worst = std::max(worst, lo.values[k][i] - hi.values[k][i]);
  return make_report("monotonicity", worst, 0.0, 1e-10);
}

std::vector<InequalityReport> check_data_stability(const StabilityPair& p,
                                                   std::optional<double> xbar) {
  const ScalarSolution& s1 = *p.s1;
  const ScalarSolution& s2 = *p.s2;
  if (s1.nodes != s2.nodes || s1.steps() != s2.steps())
    throw std::invalid_argument("check_data_stability: shape mismatch");
  const Coefficients& c1 = *p.c1;
  const Coefficients& c2 = *p.c2;
  const int K = s1.steps(), N = s1.nodes - 1;
  const double h = s1.h, t0 = s1.t_start;

  // the estimate compares two problems sharing the same speed
  for (int k = 0; k <= K; k += std::max(1, K / 8))
    for (int i = 0; i <= N; i += std::max(1, N / 8))
      if (std::abs(c1.g(t0 + k * h, i * h) - c2.g(t0 + k * h, i * h)) > 1e-12)
        throw std::invalid_argument("check_data_stability: speeds differ");

  const double M = std::max(c1.M, c2.M);
  const double G1 = std::max(c1.G1, c2.G1);
  const double F1 = std::max(c1.F1, c2.F1);
  const double Finf = std::max(c1.Finf, c2.Finf);

  const double du0 = l1_distance(s1.values[0], s2.values[0], h);
  double u02_l1 = 0.0, u01_l1 = 0.0;
  {
    std::vector<double> zero(s1.values[0].size(), 0.0);
    u01_l1 = l1_distance(s1.values[0], zero, h);
    u02_l1 = l1_distance(s2.values[0], zero, h);
  }

  // cumulative quantities over time
  double dm_inf = 0.0, df_l1 = 0.0, db_l1 = 0.0;
  double prev_frow = 0.0, prev_db = 0.0;
  std::vector<InequalityReport> out;
  double worst_lin = -1.0;
  bool lin_holds = true;
  InequalityReport rep_lin;
  for (int k = 0; k <= K; ++k) {
    const double t_abs = t0 + k * h, t = k * h;
    double frow = 0.0, fprev = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double x = i * h;
      dm_inf = std::max(dm_inf, std::abs(c1.m(t_abs, x) - c2.m(t_abs, x)));
      const double dfv = std::abs(c1.f(t_abs, x) - c2.f(t_abs, x));
      if (i > 0) frow += 0.5 * h * (fprev + dfv);
      fprev = dfv;
    }
    const double dbv = std::abs(c1.b(t_abs) - c2.b(t_abs));
    if (k > 0) {
      df_l1 += 0.5 * h * (prev_frow + frow);
      db_l1 += 0.5 * h * (prev_db + dbv);
    }
    prev_frow = frow;
    prev_db = dbv;

    const double b2_l1 = c2.b.l1(t0, t_abs);
    const double lhs = s1.l1_distance_at(k, s2);
    const double rhs = safe_exp(M * t) * du0 +
                       safe_exp(2 * (G1 + M) * t) * (2 * df_l1 + db_l1) +
                       safe_exp((2 * G1 + M) * t) *
                           (u02_l1 + 2 * t * F1 + b2_l1) * t * dm_inf;
    const double tol = 1e-9 * (1.0 + std::abs(rhs));
    lin_holds = lin_holds && lhs <= rhs + tol;
    const double ratio = lhs / std::max(rhs, 1e-300);
    if (ratio > worst_lin) {
      worst_lin = ratio;
      rep_lin = make_report("stability_linear", lhs, rhs, tol, "t = " + std::to_string(t));
    }
  }
  rep_lin.holds = lin_holds;
  out.push_back(rep_lin);

  if (xbar) {
    const double T = K * h;
    const int ix = static_cast<int>(std::llround(*xbar / h));
    if (ix < 0 || ix > N)
      throw std::invalid_argument("check_data_stability: xbar outside the mesh");
    // sigma(T) <= g_upper T, so this keeps xbar in the datum-influenced region
    if (*xbar <= std::max(c1.g_upper, c2.g_upper) * T)
      throw std::invalid_argument("check_data_stability: xbar must exceed sigma(t_end)");
    double lhs = 0.0;
    for (int k = 0; k + 1 <= K; ++k) {
      const double a = std::abs(s1.values[k][ix] - s2.values[k][ix]);
      const double b = std::abs(s1.values[k + 1][ix] - s2.values[k + 1][ix]);
      lhs += 0.5 * h * (a + b);
    }
    const double rhs = safe_exp((G1 + M) * T) * T *
                           (safe_exp(G1 * T) * u01_l1 + T * T * Finf) * dm_inf +
                       safe_exp(M * T) * du0 + safe_exp((2 * G1 + M) * T) * df_l1;
    out.push_back(make_report("vertical_stability", lhs, rhs,
                              1e-9 * (1.0 + std::abs(rhs)),
                              "xbar = " + std::to_string(*xbar)));
  }
  return out;
}

}  // namespace rsir

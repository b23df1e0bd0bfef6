#include "rsir/oracles.hpp"

#include <cmath>
#include <memory>

namespace rsir {

namespace {

SystemSpec scalar_spec(const Grid& g) {
  SystemSpec spec;
  spec.n = 1;
  spec.dt = g.dt();
  spec.meshes = {{g.segment_nodes(0), g.cell_width(), g.segment_cells(0), 0}};
  spec.speeds = {ComponentSpeed{}};
  spec.gamma_diag = {[](double, double) { return 0.0; }};
  spec.gamma_off.resize(1);
  spec.beta = {{{}, [](double, std::span<const double>) { return 0.0; }}};
  spec.eq_declared = true;
  spec.pos_declared = true;
  return spec;
}

std::function<bool(double, double)> off_sigma_region() {
  return [](double t, double x) { return std::abs(x - t) > 1e-12; };
}

}  // namespace

AnalyticCase blowup_case() {
  AnalyticCase c;
  c.name = "blowup";
  c.closed_form = [](double t, double x) {
    if (x < t) return 0.0;
    return std::exp(t - x) / (2.0 - std::exp(t));
  };
  c.valid_region = off_sigma_region();
  c.l1_norm = [](double t) { return 1.0 / (2.0 - std::exp(t)); };
  c.horizon_hint = 0.68;
  c.initial = [](double x) { return std::exp(-x); };
  c.make_spec = [](const Grid& g) {
    SystemSpec spec = scalar_spec(g);
    // mass feedback m = 1 - 2 ||w||_1, realized as alpha[w] = 2 integral w
    // against gamma = -1
    const double h = g.cell_width();
    const int nodes = g.segment_nodes(0);
    spec.alpha = [h, nodes](const StateSlice& w, AlphaApplied& out) {
      double mass = 0.0;
      for (int i = 0; i + 1 < nodes; ++i) mass += 0.5 * h * (w[0][i] + w[0][i + 1]);
      for (int i = 0; i < nodes; ++i) out.diag[0][i] = 2.0 * mass;
    };
    spec.gamma_diag[0] = [](double, double) { return -1.0; };
    spec.constants.A_L = 2.0;
    spec.constants.A_1 = 2.0 * g.age_max();
    spec.constants.C_inf = 1.0;
    spec.neg_declared = false;
    return spec;
  };
  return c;
}

AnalyticCase transport_case(std::function<double(double)> u0) {
  AnalyticCase c;
  c.name = "transport";
  c.initial = u0;
  c.closed_form = [u0](double t, double x) { return x < t ? 0.0 : u0(x - t); };
  c.valid_region = [](double, double) { return true; };
  c.horizon_hint = 1.0;
  c.make_spec = [](const Grid& g) { return scalar_spec(g); };
  return c;
}

AnalyticCase decay_case(double mu, std::function<double(double)> u0) {
  AnalyticCase c;
  c.name = "decay";
  c.initial = u0;
  c.closed_form = [u0, mu](double t, double x) {
    return x < t ? 0.0 : u0(x - t) * std::exp(-mu * t);
  };
  c.valid_region = [](double, double) { return true; };
  c.horizon_hint = 1.0;
  c.make_spec = [mu](const Grid& g) {
    SystemSpec spec = scalar_spec(g);
    spec.gamma_diag[0] = [mu](double, double) { return -mu; };
    spec.constants.C_inf = mu;
    spec.neg_declared = mu >= 0;
    return spec;
  };
  return c;
}

OracleRun run_oracle(const AnalyticCase& c, double age_max, int cells_per_unit,
                     double t_check, const FixedPointOptions& opts) {
  auto grid = std::make_shared<Grid>(age_max, cells_per_unit, t_check);
  SystemSpec spec = c.make_spec(*grid);
  GridFunction u0 = GridFunction::sample(grid, c.initial);
  SystemState s0;
  s0.comp.push_back(std::vector<double>(u0.values().begin(), u0.values().end()));

  OracleRun run;
  run.solution = solve_global(spec, s0, 0.0, t_check, opts);
  const auto& traj = run.solution.traj;
  const int k = traj.steps();
  const double h = grid->cell_width();
  const auto& row = traj.comp[0][k];
  const double t = traj.time(k);

  double sup_exact = 0.0, sup_err = 0.0;
  for (int i = 0; i < grid->segment_nodes(0); ++i) {
    const double x = i * h;
    const double ex = c.closed_form(t, x);
    sup_exact = std::max(sup_exact, std::abs(ex));
    if (c.valid_region(t, x)) sup_err = std::max(sup_err, std::abs(row[i] - ex));
  }
  run.rel_linf_err = sup_exact > 0 ? sup_err / sup_exact : sup_err;
  double mass = 0.0;
  for (int i = 0; i + 1 < grid->segment_nodes(0); ++i)
    mass += 0.5 * h * (std::abs(row[i]) + std::abs(row[i + 1]));
  run.l1_value = mass;
  run.l1_exact = c.l1_norm ? c.l1_norm(t) : 0.0;
  return run;
}

}  // namespace rsir

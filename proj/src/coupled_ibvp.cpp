#include "rsir/coupled_ibvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsir {

namespace {

double safe_exp(double x) {
  return x > 700 ? std::numeric_limits<double>::infinity() : std::exp(x);
}

double row_l1(std::span<const double> v, double h) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    acc += 0.5 * h * (std::abs(v[i]) + std::abs(v[i + 1]));
  return acc;
}

double row_tv(std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) acc += std::abs(v[i + 1] - v[i]);
  return acc;
}

double row_linf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double row_l1_diff(std::span<const double> a, std::span<const double> b, double h) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    acc += 0.5 * h * (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1]));
  return acc;
}

void prepare_alpha(const SystemSpec& spec, const StateSlice& slice, AlphaApplied& out) {
  for (int i = 0; i < spec.n; ++i) {
    out.diag[i].assign(spec.meshes[i].nodes, 0.0);
    out.source[i].assign(spec.meshes[i].nodes, 0.0);
  }
  if (spec.alpha) spec.alpha(slice, out);
}

}  // namespace

void SystemSpec::validate() const {
  if (n <= 0 || dt <= 0) throw std::invalid_argument("SystemSpec: bad size or step");
  if (static_cast<int>(meshes.size()) != n || static_cast<int>(beta.size()) != n ||
      static_cast<int>(speeds.size()) != n || static_cast<int>(gamma_diag.size()) != n ||
      static_cast<int>(gamma_off.size()) != n)
    throw std::invalid_argument("SystemSpec: per-component arrays must have length n");
  for (int i = 0; i < n; ++i) {
    if (meshes[i].nodes < 2) throw std::invalid_argument("SystemSpec: mesh too small");
    if (meshes[i].trace_node < 0 || meshes[i].trace_node >= meshes[i].nodes)
      throw std::invalid_argument("SystemSpec: trace node outside mesh");
    for (int d : beta[i].deps)
      if (d >= i)
        throw std::invalid_argument("SystemSpec: boundary rule breaks triangularity");
    for (const auto& [j, fn] : gamma_off[i]) {
      if (j < 0 || j >= n || j == i)
        throw std::invalid_argument("SystemSpec: bad off-diagonal gamma index");
      if (meshes[j].nodes != meshes[i].nodes)
        throw std::invalid_argument("SystemSpec: off-diagonal gamma couples different meshes");
      (void)fn;
    }
  }
}

double SystemState::l1_total(double h) const {
  double acc = 0.0;
  for (const auto& c : comp) acc += row_l1(c, h);
  return acc;
}

double SystemState::linf() const {
  double m = 0.0;
  for (const auto& c : comp) m = std::max(m, row_linf(c));
  return m;
}

SystemState SystemTrajectory::state_at(int k) const {
  SystemState s;
  s.comp.reserve(comp.size());
  for (const auto& c : comp) s.comp.push_back(c[k]);
  return s;
}

StateSlice SystemTrajectory::slice(int k) const {
  StateSlice s;
  s.reserve(comp.size());
  for (const auto& c : comp) s.emplace_back(c[k]);
  return s;
}

double dx_distance(const SystemTrajectory& a, const SystemTrajectory& b) {
  double d = 0.0;
  const double h = a.dt;  // meshes share the cell width
  for (std::size_t i = 0; i < a.comp.size(); ++i) {
    for (std::size_t k = 0; k < a.comp[i].size(); ++k) {
      double acc = 0.0;
      const auto& va = a.comp[i][k];
      const auto& vb = b.comp[i][k];
      for (std::size_t q = 0; q + 1 < va.size(); ++q)
        acc += 0.5 * h * (std::abs(va[q] - vb[q]) + std::abs(va[q + 1] - vb[q + 1]));
      d = std::max(d, acc);
    }
  }
  return d;
}

std::pair<double, double> ball_constants(const SystemSpec& spec, const SystemState& u0) {
  const auto& c = spec.constants;
  const double h = spec.dt;
  double l1 = 0.0, linf = 0.0, tv = 0.0;
  for (const auto& v : u0.comp) {
    l1 += row_l1(v, h);
    linf = std::max(linf, row_linf(v));
    tv += row_tv(v);
  }
  const double k1 = l1 + c.B_1;
  const double gch = c.g_lower;
  const double bl = 1.0 + spec.n * c.B_L / gch;
  const double k8a = bl * linf + c.B_inf / gch;
  const double k8b = (5.0 + c.G_inf / gch) * (2.0 * c.B_inf / gch + bl * (linf + tv));
  return {2.0 * k1, 2.0 * std::max(k8a, k8b)};
}

SystemTrajectory apply_T(const SystemSpec& spec, const SystemTrajectory& w,
                         const SystemState& u0) {
  const int K = w.steps();
  const double dt = w.dt, t0 = w.t_start;

  // nonlocal coupling frozen at w, per time node
  std::vector<AlphaApplied> frozen(K + 1);
  for (int k = 0; k <= K; ++k) {
    frozen[k].diag.resize(spec.n);
    frozen[k].source.resize(spec.n);
    prepare_alpha(spec, w.slice(k), frozen[k]);
  }

  SystemTrajectory u;
  u.t_start = t0;
  u.dt = dt;
  u.comp.resize(spec.n);

  for (int i = 0; i < spec.n; ++i) {
    const auto& mesh = spec.meshes[i];
    const auto& speed = spec.speeds[i];

    ScalarEngineInput in;
    in.nodes = mesh.nodes;
    in.h = dt;
    in.t_start = t0;
    in.steps = K;
    in.u0 = u0.comp[i];
    in.unit_speed = speed.unit;

    in.mu_at = [&, i](int k, int node) {
      const double t = t0 + k * dt, x = node * dt;
      double m = -frozen[k].diag[i][node] - spec.gamma_diag[i](t, x);
      if (!speed.unit) m += speed.dg_dx(t, x);
      return m;
    };
    in.f_at = [&, i](int k, int node) {
      const double t = t0 + k * dt, x = node * dt;
      double f = frozen[k].source[i][node];
      for (const auto& [j, fn] : spec.gamma_off[i]) f += fn(t, x) * w.comp[j][k][node];
      return f;
    };
    auto flux_at = [&, i](int k) {
      const double t = t0 + k * dt;
      std::vector<double> traces(spec.beta[i].deps.size());
      for (std::size_t d = 0; d < traces.size(); ++d) {
        int j = spec.beta[i].deps[d];
        traces[d] = u.comp[j][k][spec.meshes[j].trace_node];
      }
      return spec.beta[i].flux(t, traces);
    };
    in.boundary_density = [flux_at, speed, t0, dt](int k) {
      return flux_at(k) / speed.g(t0 + k * dt, 0.0);
    };

    Coefficients generic;
    if (!speed.unit) {
      generic.g = speed.g;
      generic.dg_dx = speed.dg_dx;
      generic.g_lower = speed.lower;
      generic.g_upper = speed.upper;
      generic.unit_speed = false;
      // the traced boundary branch samples the flux between time nodes:
      // interpolate the already-updated traces linearly, as stored
      {
        std::vector<double> times(K + 1), flux(K + 1);
        for (int k = 0; k <= K; ++k) {
          times[k] = t0 + k * dt;
          flux[k] = flux_at(k);
        }
        generic.b = TimeSeries(std::move(times), std::move(flux),
                               TimeSeries::Mode::PiecewiseLinear);
      }
      generic.m = [&, i](double t, double x) {
        // nearest-node sampling in time for the frozen nonlocal part
        int k = std::clamp(static_cast<int>(std::llround((t - t0) / dt)), 0, K);
        int node = std::clamp(static_cast<int>(std::llround(x / dt)), 0, mesh.nodes - 1);
        return -frozen[k].diag[i][node] - spec.gamma_diag[i](t, x);
      };
      generic.f = [&, i](double t, double x) {
        int k = std::clamp(static_cast<int>(std::llround((t - t0) / dt)), 0, K);
        int node = std::clamp(static_cast<int>(std::llround(x / dt)), 0, mesh.nodes - 1);
        double f = frozen[k].source[i][node];
        for (const auto& [j, fn] : spec.gamma_off[i]) f += fn(t, x) * w.comp[j][k][node];
        return f;
      };
      in.coeffs = &generic;
    }

    try {
      u.comp[i] = scalar_march(in);
    } catch (const std::exception& e) {
      throw SolverFailure("component " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return u;
}

std::pair<SystemTrajectory, FixedPointReport> solve_window(const SystemSpec& spec,
                                                           const SystemState& u0,
                                                           double t_start, int steps,
                                                           const FixedPointOptions& opts) {
  auto [k1, kinf] = ball_constants(spec, u0);
  const double tol = opts.fp_tol * std::max(1.0, k1);

  SystemTrajectory w;
  w.t_start = t_start;
  w.dt = spec.dt;
  w.comp.resize(spec.n);
  for (int i = 0; i < spec.n; ++i)
    w.comp[i].assign(steps + 1, std::vector<double>(u0.comp[i].begin(), u0.comp[i].end()));

  FixedPointReport rep;
  rep.t_start = t_start;
  rep.t_end = t_start + steps * spec.dt;
  rep.k1_bound = k1;
  rep.kinf_bound = kinf;

  const double ratio_floor = std::max(tol * 10.0, 1e-13 * (k1 + 1.0));
  SystemTrajectory u;
  for (int it = 1; it <= opts.max_iter; ++it) {
    u = apply_T(spec, w, u0);
    const double d = dx_distance(u, w);
    rep.applications = it;
    if (!rep.distances.empty() && rep.distances.back() > ratio_floor)
      rep.ratios.push_back(d / rep.distances.back());
    rep.distances.push_back(d);
    w = std::move(u);
    if (d < tol) {
      rep.converged = true;
      break;
    }
  }
  rep.iterations = rep.converged ? std::max(1, rep.applications - 1) : rep.applications;
  rep.measured_ratio = 0.0;
  for (double r : rep.ratios) rep.measured_ratio = std::max(rep.measured_ratio, r);

  // ball membership of the returned iterate (reported, not enforced)
  double max_l1 = 0, max_linf = 0, max_tv = 0;
  for (int k = 0; k <= steps; ++k) {
    double l1 = 0;
    for (int i = 0; i < spec.n; ++i) {
      l1 += row_l1(w.comp[i][k], spec.dt);
      max_linf = std::max(max_linf, row_linf(w.comp[i][k]));
      max_tv = std::max(max_tv, row_tv(w.comp[i][k]));
    }
    max_l1 = std::max(max_l1, l1);
  }
  rep.max_l1 = max_l1;
  rep.max_linf = max_linf;
  rep.max_tv = max_tv;
  rep.in_ball = max_l1 <= k1 && max_linf <= kinf && max_tv <= kinf;
  return {std::move(w), rep};
}

GlobalSolution solve_global(const SystemSpec& spec, const SystemState& u0,
                            double t_start, double t_end,
                            const FixedPointOptions& opts) {
  spec.validate();
  const double dt = spec.dt;
  const double span = t_end - t_start;
  const int total = static_cast<int>(std::llround(span / dt));
  if (total < 0 || std::abs(total * dt - span) > 1e-9 * std::max(1.0, std::abs(span)))
    throw std::invalid_argument("solve_global: horizon must be a whole number of steps");

  GlobalSolution out;
  out.traj.t_start = t_start;
  out.traj.dt = dt;
  out.traj.comp.resize(spec.n);
  for (int i = 0; i < spec.n; ++i)
    out.traj.comp[i].push_back(
        std::vector<double>(u0.comp[i].begin(), u0.comp[i].end()));

  const double blowup_threshold = opts.blowup_factor * (u0.linf() + 1.0);
  const int cap_steps = std::max(1, static_cast<int>(std::llround(opts.window_initial / dt)));

  SystemState current = u0;
  int done = 0;
  int window = std::min(cap_steps, total);
  int quick_streak = 0;

  auto fail = [&](const std::string& why) {
    const double t_last = t_start + done * dt;
    if (spec.neg_declared && spec.pos_declared && spec.eq_declared)
      throw SolverFailure("dissipative system failed to extend at t = " +
                          std::to_string(t_last) + " (" + why + ")");
    out.status = TerminationStatus::BlowUp;
    out.end_time = t_last;
    out.diagnostic = "blow-up evidence at t = " + std::to_string(t_last) + ": " + why;
  };

  while (done < total) {
    window = std::min(window, total - done);
    auto [traj, rep] = solve_window(spec, current, t_start + done * dt, window, opts);
    if (!rep.converged || rep.measured_ratio > 0.5) {
      if (window > 1) {
        window = std::max(1, window / 2);
        quick_streak = 0;
        continue;
      }
      fail(!rep.converged ? "no contraction at the minimal window"
                          : "contraction ratio above 1/2 at the minimal window");
      return out;
    }
    out.windows.push_back(rep);
    for (int i = 0; i < spec.n; ++i)
      for (int k = 1; k <= window; ++k)
        out.traj.comp[i].push_back(std::move(traj.comp[i][k]));
    done += window;
    current = out.traj.state_at(done);
    if (current.linf() > blowup_threshold) {
      fail("sup norm exceeded the blow-up threshold");
      return out;
    }
    quick_streak = rep.iterations <= 2 ? quick_streak + 1 : 0;
    if (quick_streak >= 2 && window < cap_steps) {
      window = std::min(cap_steps, window * 2);
      quick_streak = 0;
    }
  }
  out.end_time = t_start + total * dt;
  return out;
}

InequalityReport check_neg_condition(const SystemSpec& spec, const SystemState& u,
                                     double t) {
  AlphaApplied a;
  a.diag.resize(spec.n);
  a.source.resize(spec.n);
  StateSlice slice;
  slice.reserve(spec.n);
  for (const auto& c : u.comp) slice.emplace_back(c);
  prepare_alpha(spec, slice, a);

  // sum (alpha_i[u] + gamma_i) . u per node within each mesh group
  std::vector<std::vector<double>> group_sum;
  std::vector<int> group_of(spec.n);
  std::vector<int> group_ids;
  for (int i = 0; i < spec.n; ++i) {
    int gid = spec.meshes[i].group;
    auto it = std::find(group_ids.begin(), group_ids.end(), gid);
    if (it == group_ids.end()) {
      group_ids.push_back(gid);
      group_sum.emplace_back(spec.meshes[i].nodes, 0.0);
      group_of[i] = static_cast<int>(group_ids.size()) - 1;
    } else {
      group_of[i] = static_cast<int>(it - group_ids.begin());
    }
  }
  for (int i = 0; i < spec.n; ++i) {
    auto& acc = group_sum[group_of[i]];
    for (int q = 0; q < spec.meshes[i].nodes; ++q) {
      const double x = q * spec.meshes[i].h;
      double row = (a.diag[i][q] + spec.gamma_diag[i](t, x)) * u.comp[i][q];
      row += a.source[i][q];
      for (const auto& [j, fn] : spec.gamma_off[i]) row += fn(t, x) * u.comp[j][q];
      acc[q] += row;
    }
  }
  double worst = -1e300;
  for (const auto& gsum : group_sum)
    for (double v : gsum) worst = std::max(worst, v);
  return make_report("neg_condition", worst, 0.0, 1e-10);
}

InequalityReport check_solution_stability(const SystemSpec& specA,
                                          const GlobalSolution& runA,
                                          const SystemSpec& specB,
                                          const GlobalSolution& runB) {
  const SystemTrajectory& A = runA.traj;
  const SystemTrajectory& B = runB.traj;
  const int K = std::min(A.steps(), B.steps());
  const double dt = A.dt;
  const auto& c = specA.constants;
  const int n = specA.n;

  // constants valid for both initial data
  double u0_l1A = 0, u0_l1B = 0, u0_linfA = 0, u0_linfB = 0, tvA = 0, tvB = 0;
  for (int i = 0; i < n; ++i) {
    u0_l1A += row_l1(A.comp[i][0], dt);
    u0_l1B += row_l1(B.comp[i][0], dt);
    u0_linfA = std::max(u0_linfA, row_linf(A.comp[i][0]));
    u0_linfB = std::max(u0_linfB, row_linf(B.comp[i][0]));
    tvA += row_tv(A.comp[i][0]);
    tvB += row_tv(B.comp[i][0]);
  }
  const double gch = c.g_lower;
  const double bl = 1.0 + n * c.B_L / gch;
  const double k1 = 2.0 * (std::max(u0_l1A, u0_l1B) + c.B_1);
  const double kinf =
      2.0 * std::max(bl * std::max(u0_linfA, u0_linfB) + c.B_inf / gch,
                     (5.0 + c.G_inf / gch) * (2.0 * c.B_inf / gch +
                                              bl * (std::max(u0_linfA, u0_linfB) +
                                                    std::max(tvA, tvB))));
  const double M = c.A_L * k1 + c.C_inf;
  const double Finf = 2.0 * n * kinf * (c.C_inf + c.A_L * k1);

  // sup over time nodes of the boundary-rule difference on shared traces
  double dbeta = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double t = A.time(k);
    for (int i = 0; i < n; ++i) {
      std::vector<double> traces(specA.beta[i].deps.size());
      for (std::size_t d = 0; d < traces.size(); ++d) {
        int j = specA.beta[i].deps[d];
        traces[d] = A.comp[j][k][specA.meshes[j].trace_node];
      }
      dbeta = std::max(dbeta, std::abs(specA.beta[i].flux(t, traces) -
                                       specB.beta[i].flux(t, traces)));
    }
  }
  double du0 = 0.0;
  for (int i = 0; i < n; ++i) du0 += row_l1_diff(A.comp[i][0], B.comp[i][0], dt);

  double worst_ratio = -1.0;
  bool holds_all = true;
  InequalityReport rep;
  for (int k = 0; k <= K; ++k) {
    const double t = k * dt;
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) lhs += row_l1_diff(A.comp[i][k], B.comp[i][k], dt);

    const double h1 =
        n * safe_exp(2 * (c.G_1 + M) * t) * (2 * c.A_L * k1 + 2 * n * c.A_1 * kinf + 2 * c.C_inf) +
        n * n * safe_exp(3 * (c.G_1 + M) * t) * (c.B_L * c.A_1 / std::max(c.G_inf, 1e-300)) *
            (safe_exp(c.G_1 * t) * u0_linfA + t * Finf) +
        n * n * safe_exp((4 * c.G_1 + 3 * M) * t) * c.B_L *
            (c.A_L * k1 + n * c.A_1 * kinf + c.C_inf) +
        n * n * safe_exp(2 * (c.G_1 + M) * t) * c.A_1 *
            (u0_linfB + 2 * n * t * Finf + n / gch * (c.B_inf + n * c.B_L * kinf));
    const double h2 = n * safe_exp(M * t) * (1.0 + c.B_L * safe_exp(2 * (c.G_1 + M) * t));
    const double lip_log = t * h1;  // Gronwall factor exponent
    double lcal;
    if (lip_log > 700)
      lcal = std::numeric_limits<double>::infinity();
    else
      lcal = (h2 + t * safe_exp(2 * (c.G_1 + M) * t)) * std::exp(lip_log);
    const double rhs = lcal * (du0 + dbeta);
    const double tol = 1e-9 * (1.0 + std::min(rhs, 1e300));
    holds_all = holds_all && lhs <= rhs + tol;
    const double ratio = lhs / std::max(rhs, 1e-300);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      rep = make_report("solution_stability", lhs, rhs, tol, "t = " + std::to_string(t));
      if (!std::isfinite(rhs))
        rep.log10_rhs =
            (lip_log + std::log(std::max(du0 + dbeta, 1e-300))) / std::log(10.0);
    }
  }
  rep.holds = holds_all;
  return rep;
}

}  // namespace rsir

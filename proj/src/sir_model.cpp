#include "rsir/sir_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rsir {

namespace {

constexpr int kMaxKernelSamples = 160;

int sample_stride(int n, int cap) { return std::max(1, n / cap); }

// Infection pressure P(t, A) = integral lambda(A, a') I(t, a') da' on every
// node of the segmented grid, per-segment trapezoid against the flat nodal
// vector of I.
class PressureField {
 public:
  PressureField(const Kernel& k, std::shared_ptr<const Grid> grid)
      : kernel_(k), grid_(std::move(grid)) {
    const Grid& g = *grid_;
    weights_.resize(g.total_nodes());
    ages_.resize(g.total_nodes());
    for (int j = 0; j < g.segments(); ++j) {
      const int off = g.segment_offset(j), nn = g.segment_nodes(j);
      for (int i = 0; i < nn; ++i) {
        ages_[off + i] = g.node_age(j, i);
        double w = (i == 0 || i == nn - 1) ? 0.5 * g.cell_width() : g.cell_width();
        weights_[off + i] = w;
      }
    }
    if (!kernel_.separable) {
      // materialize the trapezoid-weighted kernel matrix once
      const int n = g.total_nodes();
      matrix_.resize(static_cast<std::size_t>(n) * n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          matrix_[static_cast<std::size_t>(r) * n + c] =
              kernel_.lambda(ages_[r], ages_[c]) * weights_[c];
    } else {
      psi_w_.resize(g.total_nodes());
      phi_.resize(g.total_nodes());
      for (int q = 0; q < g.total_nodes(); ++q) {
        psi_w_[q] = kernel_.psi(ages_[q]) * weights_[q];
        phi_[q] = kernel_.phi(ages_[q]);
      }
    }
  }

  // I given as the full flat nodal vector on the grid layout
  void evaluate(std::span<const double> i_flat, std::span<double> out) const {
    const int n = grid_->total_nodes();
    if (kernel_.separable) {
      double dot = 0.0;
      for (int q = 0; q < n; ++q) dot += psi_w_[q] * i_flat[q];
      for (int q = 0; q < n; ++q) out[q] = phi_[q] * dot;
    } else {
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        const double* row = matrix_.data() + static_cast<std::size_t>(r) * n;
        for (int c = 0; c < n; ++c) acc += row[c] * i_flat[c];
        out[r] = acc;
      }
    }
  }

 private:
  Kernel kernel_;
  std::shared_ptr<const Grid> grid_;
  std::vector<double> weights_, ages_;
  std::vector<double> matrix_;        // general kernels
  std::vector<double> psi_w_, phi_;   // separable kernels
};

// Shared age-triggered componentization; eta empty means plain pass-through
// interfaces (also used by the time-triggered reformulation).
SirSystem build_components(const Scenario& sc, const std::vector<TimeSeries>& eta) {
  const auto grid = sc.grid;
  const Grid& g = *grid;
  const int nseg = g.segments();
  const int n = 3 * nseg;

  SirSystem sys;
  sys.grid = grid;
  SystemSpec& spec = sys.spec;
  spec.n = n;
  spec.dt = g.dt();
  spec.meshes.resize(n);
  spec.speeds.assign(n, ComponentSpeed{});
  spec.gamma_diag.resize(n);
  spec.gamma_off.resize(n);
  spec.beta.resize(n);

  for (int j = 0; j < nseg; ++j) {
    for (int c = 0; c < 3; ++c) {
      auto& mesh = spec.meshes[3 * j + c];
      mesh.nodes = g.segment_nodes(j);
      mesh.h = g.cell_width();
      mesh.trace_node = g.segment_cells(j);
      mesh.group = j;
    }
    const double a0 = g.segment_start(j);
    const Rates& r = sc.rates;
    spec.gamma_diag[3 * j + 0] = [r, a0](double t, double x) { return -r.d_S(t, x + a0); };
    spec.gamma_diag[3 * j + 1] = [r, a0](double t, double x) {
      return -(r.d_I(t, x + a0) + r.r_I(t, x + a0));
    };
    spec.gamma_diag[3 * j + 2] = [r, a0](double t, double x) { return -r.d_R(t, x + a0); };
    spec.gamma_off[3 * j + 2].emplace_back(
        3 * j + 1, [r, a0](double t, double x) { return r.r_I(t, x + a0); });
  }

  // boundary rules: exogenous data at age 0, vaccination transfer at
  // interior interfaces
  spec.beta[0] = {{}, [b = sc.S_b](double t, std::span<const double>) { return b(t); }};
  spec.beta[1] = {{}, [b = sc.I_b](double t, std::span<const double>) { return b(t); }};
  spec.beta[2] = {{}, [b = sc.R_b](double t, std::span<const double>) { return b(t); }};
  for (int j = 1; j < nseg; ++j) {
    const bool has_eta = !eta.empty();
    TimeSeries ej = has_eta ? eta[j - 1] : TimeSeries::constant(0.0);
    spec.beta[3 * j + 0] = {{3 * (j - 1) + 0}, [ej](double t, std::span<const double> tr) {
                              return (1.0 - ej(t)) * tr[0];
                            }};
    spec.beta[3 * j + 1] = {{3 * (j - 1) + 1},
                            [](double, std::span<const double> tr) { return tr[0]; }};
    spec.beta[3 * j + 2] = {{3 * (j - 1) + 0, 3 * (j - 1) + 2},
                            [ej](double t, std::span<const double> tr) {
                              return ej(t) * tr[0] + tr[1];
                            }};
  }

  // nonlocal coupling through the infection pressure
  auto pressure = std::make_shared<PressureField>(sc.kernel, grid);
  spec.alpha = [pressure, grid, nseg](const StateSlice& w, AlphaApplied& out) {
    const Grid& gg = *grid;
    std::vector<double> i_flat(gg.total_nodes());
    for (int j = 0; j < nseg; ++j) {
      auto src = w[3 * j + 1];
      std::copy(src.begin(), src.end(), i_flat.begin() + gg.segment_offset(j));
    }
    std::vector<double> P(gg.total_nodes());
    pressure->evaluate(i_flat, P);
    for (int j = 0; j < nseg; ++j) {
      const int off = gg.segment_offset(j), nn = gg.segment_nodes(j);
      for (int q = 0; q < nn; ++q) {
        out.diag[3 * j + 0][q] = -P[off + q];
        out.source[3 * j + 1][q] = P[off + q] * w[3 * j + 0][q];
      }
    }
  };

  auto& k = spec.constants;
  k.A_L = sc.kernel.Lambda_inf;
  k.A_1 = sc.kernel.Lambda_inf * g.age_max();
  k.A_2 = sc.kernel.Lambda_L * nseg;
  k.C_L = sc.rates.R_L;
  k.C_inf = 2.0 * sc.rates.R_inf;
  k.B_L = 2.0;
  {
    const double T = g.horizon();
    k.B_1 = std::max({sc.S_b.l1(0, T), sc.I_b.l1(0, T), sc.R_b.l1(0, T)});
    k.B_inf = std::max({sc.S_b.sup(0, T), sc.I_b.sup(0, T), sc.R_b.sup(0, T)});
  }
  k.G_1 = 0.0;
  // any upper bound on tv(g) is a valid declaration; a positive one keeps
  // the Gronwall constant of the data-stability estimate non-degenerate
  // (it carries a 1/G_inf factor)
  k.G_inf = 1.0;
  k.g_lower = k.g_upper = 1.0;
  spec.eq_declared = true;
  return sys;
}

void scan_eligibility(const Scenario& sc, bool& pos, bool& neg) {
  pos = sc.S_o.min_value() >= 0 && sc.I_o.min_value() >= 0 && sc.R_o.min_value() >= 0;
  const double T = sc.grid->horizon();
  pos = pos && sc.S_b.min(0, T) >= 0 && sc.I_b.min(0, T) >= 0 && sc.R_b.min(0, T) >= 0;

  neg = true;
  const Grid& g = *sc.grid;
  const int st = sample_stride(g.time_steps(), 64);
  const int sa = sample_stride(g.total_nodes(), 256);
  for (int k = 0; k <= g.time_steps() && neg; k += st) {
    const double t = g.time_node(k);
    for (int j = 0; j < g.segments() && neg; ++j)
      for (int i = 0; i < g.segment_nodes(j) && neg; i += sa) {
        const double a = g.node_age(j, i);
        if (sc.rates.d_S(t, a) < 0 || sc.rates.d_I(t, a) < 0 || sc.rates.d_R(t, a) < 0 ||
            sc.rates.r_I(t, a) < 0)
          neg = false;
      }
  }
  if (neg) {
    const int n = g.total_nodes();
    const int s = sample_stride(n, kMaxKernelSamples);
    for (int r = 0; r < n && neg; r += s) {
      for (int c = 0; c < n && neg; c += s) {
        double a = 0, ap = 0;
        // flat index -> age (segments laid out in order)
        for (int j = 0; j < g.segments(); ++j) {
          if (r >= g.segment_offset(j) && r < g.segment_offset(j) + g.segment_nodes(j))
            a = g.node_age(j, r - g.segment_offset(j));
          if (c >= g.segment_offset(j) && c < g.segment_offset(j) + g.segment_nodes(j))
            ap = g.node_age(j, c - g.segment_offset(j));
        }
        if (sc.kernel.lambda(a, ap) < 0) neg = false;
      }
    }
  }
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << (valid ? "valid" : "INVALID") << ", pos-eligible: " << (pos_eligible ? "yes" : "no")
     << ", neg-eligible: " << (neg_eligible ? "yes" : "no") << "\n";
  for (const auto& i : issues)
    os << (i.error ? "  error   " : "  warning ") << "[" << i.code << "] " << i.message
       << "\n";
  return os.str();
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  auto err = [&](std::string code, std::string msg) {
    rep.issues.push_back({true, std::move(code), std::move(msg)});
    rep.valid = false;
  };
  auto warn = [&](std::string code, std::string msg) {
    rep.issues.push_back({false, std::move(code), std::move(msg)});
  };

  const Grid& g = *sc.grid;
  const double T = g.horizon();

  // kernel: declared sup+TV and Lipschitz constants
  {
    const int n = g.total_nodes();
    const int s = sample_stride(n, kMaxKernelSamples);
    std::vector<double> ages;
    for (int j = 0; j < g.segments(); ++j)
      for (int i = 0; i < g.segment_nodes(j); i += s) ages.push_back(g.node_age(j, i));
    double worst_sum = 0, worst_ap = 0;
    double worst_lip = 0, lip_a = 0, lip_ap = 0;
    for (double ap : ages) {
      double sup = 0, tv = 0, prev = 0;
      bool first = true;
      for (double a : ages) {
        const double v = sc.kernel.lambda(a, ap);
        sup = std::max(sup, std::abs(v));
        if (!first) {
          tv += std::abs(v - prev);
          const double q = std::abs(v - prev) / (s * g.cell_width());
          if (q > worst_lip) {
            worst_lip = q;
            lip_a = a;
            lip_ap = ap;
          }
        }
        prev = v;
        first = false;
      }
      if (sup + tv > worst_sum) {
        worst_sum = sup + tv;
        worst_ap = ap;
      }
    }
    if (worst_sum > sc.kernel.Lambda_inf * (1.0 + 1e-6) + 1e-12)
      err("lambda_inf", "sampled sup+tv of lambda(.,a') = " + std::to_string(worst_sum) +
                            " exceeds declared " + std::to_string(sc.kernel.Lambda_inf) +
                            " at a' = " + std::to_string(worst_ap));
    if (worst_lip > sc.kernel.Lambda_L * (1.0 + 1e-6) + 1e-12)
      err("lambda_lip", "sampled Lipschitz quotient " + std::to_string(worst_lip) +
                            " exceeds declared " + std::to_string(sc.kernel.Lambda_L) +
                            " at (a, a') = (" + std::to_string(lip_a) + ", " +
                            std::to_string(lip_ap) + ")");
  }

  // rates: (dr) constants
  {
    const int st = sample_stride(g.time_steps(), 64);
    struct Named {
      const char* name;
      const std::function<double(double, double)>* fn;
    };
    const Named rates[] = {{"d_S", &sc.rates.d_S},
                           {"d_I", &sc.rates.d_I},
                           {"d_R", &sc.rates.d_R},
                           {"r_I", &sc.rates.r_I}};
    for (const auto& nr : rates) {
      for (int k = 0; k <= g.time_steps(); k += st) {
        const double t = g.time_node(k);
        double sup = 0, tv = 0, l1 = 0, prev = 0, lip = 0;
        bool first = true;
        for (int j = 0; j < g.segments(); ++j)
          for (int i = 0; i < g.segment_nodes(j); ++i) {
            const double v = (*nr.fn)(t, g.node_age(j, i));
            sup = std::max(sup, std::abs(v));
            if (!first) {
              tv += std::abs(v - prev);
              lip = std::max(lip, std::abs(v - prev) / g.cell_width());
              l1 += 0.5 * g.cell_width() * (std::abs(prev) + std::abs(v));
            }
            prev = v;
            first = false;
          }
        if (sup + tv > sc.rates.R_inf * (1.0 + 1e-6) + 1e-12) {
          err("rate_inf", std::string(nr.name) + ": sampled sup+tv " + std::to_string(sup + tv) +
                              " exceeds declared R_inf at t = " + std::to_string(t));
          break;
        }
        if (lip > sc.rates.R_L * (1.0 + 1e-6) + 1e-12) {
          err("rate_lip", std::string(nr.name) + ": sampled Lipschitz quotient " +
                              std::to_string(lip) + " exceeds declared R_L at t = " +
                              std::to_string(t));
          break;
        }
        if (l1 > sc.rates.R_1 * (1.0 + 1e-6) + 1e-12) {
          err("rate_l1", std::string(nr.name) + ": sampled L1 norm " + std::to_string(l1) +
                             " exceeds declared R_1 at t = " + std::to_string(t));
          break;
        }
      }
    }
  }

  // data signs (IB) and mass placement
  {
    if (sc.S_o.min_value() < 0 || sc.I_o.min_value() < 0 || sc.R_o.min_value() < 0)
      err("data_sign", "initial data must be nonnegative");
    if (sc.S_b.min(0, T) < 0 || sc.I_b.min(0, T) < 0 || sc.R_b.min(0, T) < 0)
      err("boundary_sign", "boundary data must be nonnegative");
    const double total = sc.S_o.l1() + sc.I_o.l1() + sc.R_o.l1();
    if (total > 0) {
      auto tail_mass = [&](double from) {
        double acc = 0.0;
        const double h = g.cell_width();
        for (int j = 0; j < g.segments(); ++j) {
          auto sS = sc.S_o.segment(j);
          auto sI = sc.I_o.segment(j);
          auto sR = sc.R_o.segment(j);
          for (std::size_t i = 0; i + 1 < sS.size(); ++i) {
            if (g.node_age(j, static_cast<int>(i)) < from) continue;
            acc += 0.5 * h *
                   (std::abs(sS[i]) + std::abs(sS[i + 1]) + std::abs(sI[i]) +
                    std::abs(sI[i + 1]) + std::abs(sR[i]) + std::abs(sR[i + 1]));
          }
        }
        return acc;
      };
      if (tail_mass(0.95 * g.age_max()) > 1e-6 * total)
        warn("truncation_tail",
             "initial mass in the last 5% of the age domain exceeds 1e-6 of total");
      if (g.age_max() > T && tail_mass(g.age_max() - T) > 1e-9 * total)
        warn("truncation_horizon",
             "initial mass within one horizon of age_max exceeds 1e-9 of total "
             "(domain truncation can influence the solution)");
    }
  }

  // policy alignment and control ranges
  if (const auto* age = std::get_if<AgeTriggeredPolicy>(&sc.policy)) {
    const auto& bounds = g.segment_bounds();
    std::vector<double> interior(bounds.begin() + 1, bounds.end() - 1);
    if (age->ages != interior)
      err("policy_ages", "vaccination ages must equal the grid's interior interfaces");
    if (age->eta.size() != age->ages.size())
      err("policy_controls", "one control per vaccination age required");
    for (std::size_t j = 0; j < age->eta.size(); ++j) {
      if (age->eta[j].min(0, T) < -1e-12 || age->eta[j].sup(0, T) > 1.0 + 1e-12)
        err("policy_range", "eta_" + std::to_string(j + 1) + " leaves [0, 1]");
    }
  } else if (const auto* tp = std::get_if<TimeTriggeredPolicy>(&sc.policy)) {
    double prev = 0.0;
    for (double tk : tp->times) {
      if (tk <= prev || tk >= T) {
        err("policy_times", "vaccination times must be strictly increasing inside (0, T)");
        break;
      }
      if (!g.aligned(tk)) {
        err("policy_times", "vaccination time " + std::to_string(tk) +
                                " does not coincide with a time node");
        break;
      }
      prev = tk;
    }
    if (tp->nu.size() != tp->times.size())
      err("policy_controls", "one control per vaccination time required");
    for (std::size_t k = 0; k < tp->nu.size(); ++k)
      for (int j = 0; j < g.segments(); ++j)
        for (int i = 0; i < g.segment_nodes(j); ++i) {
          const double v = tp->nu[k](g.node_age(j, i));
          if (v < -1e-12 || v > 1.0 + 1e-12) {
            err("policy_range", "nu_" + std::to_string(k + 1) + " leaves [0, 1]");
            j = g.segments();
            break;
          }
        }
  }

  scan_eligibility(sc, rep.pos_eligible, rep.neg_eligible);
  if (!rep.neg_eligible)
    warn("neg_eligibility",
         "signed rates or kernel: the dissipativity guarantee does not apply");
  return rep;
}

SystemState SirSystem::pack(const SIRState& s) const {
  SystemState out;
  out.comp.resize(spec.n);
  for (int j = 0; j < grid->segments(); ++j) {
    auto cs = s.S.segment(j);
    auto ci = s.I.segment(j);
    auto cr = s.R.segment(j);
    out.comp[3 * j + 0].assign(cs.begin(), cs.end());
    out.comp[3 * j + 1].assign(ci.begin(), ci.end());
    out.comp[3 * j + 2].assign(cr.begin(), cr.end());
  }
  return out;
}

SIRState SirSystem::unpack(const SystemState& s, double time) const {
  std::vector<double> vs(grid->total_nodes()), vi(grid->total_nodes()),
      vr(grid->total_nodes());
  for (int j = 0; j < grid->segments(); ++j) {
    const int off = grid->segment_offset(j);
    std::copy(s.comp[3 * j + 0].begin(), s.comp[3 * j + 0].end(), vs.begin() + off);
    std::copy(s.comp[3 * j + 1].begin(), s.comp[3 * j + 1].end(), vi.begin() + off);
    std::copy(s.comp[3 * j + 2].begin(), s.comp[3 * j + 2].end(), vr.begin() + off);
  }
  return SIRState{GridFunction(grid, std::move(vs)), GridFunction(grid, std::move(vi)),
                  GridFunction(grid, std::move(vr)), time};
}

SirSystem build_system_age_triggered(const Scenario& sc) {
  const auto* age = std::get_if<AgeTriggeredPolicy>(&sc.policy);
  if (!age) throw ConfigError("build_system_age_triggered: age-triggered policy required");
  const auto& bounds = sc.grid->segment_bounds();
  std::vector<double> interior(bounds.begin() + 1, bounds.end() - 1);
  if (age->ages != interior)
    throw ConfigError("vaccination ages must equal the grid's interior interfaces");
  SirSystem sys = build_components(sc, age->eta);
  bool pos = false, neg = false;
  scan_eligibility(sc, pos, neg);
  sys.spec.pos_declared = pos;
  sys.spec.neg_declared = neg;
  return sys;
}

TimeTriggeredPlan build_system_time_triggered(const Scenario& sc) {
  const auto* tp = std::get_if<TimeTriggeredPolicy>(&sc.policy);
  if (!tp) throw ConfigError("build_system_time_triggered: time-triggered policy required");
  const Grid& g = *sc.grid;
  TimeTriggeredPlan plan;
  plan.system = build_components(sc, {});
  bool pos = false, neg = false;
  scan_eligibility(sc, pos, neg);
  plan.system.spec.pos_declared = pos;
  plan.system.spec.neg_declared = neg;
  plan.jump_times = tp->times;
  for (double tk : plan.jump_times)
    if (!g.aligned(tk) || tk <= 0 || tk >= g.horizon())
      throw ConfigError("vaccination time " + std::to_string(tk) +
                        " does not coincide with a time node inside (0, T)");
  for (const auto& nu : tp->nu) {
    std::vector<double> nodes(g.total_nodes());
    for (int j = 0; j < g.segments(); ++j)
      for (int i = 0; i < g.segment_nodes(j); ++i)
        nodes[g.segment_offset(j) + i] = nu(g.node_age(j, i));
    plan.nu_nodes.push_back(std::move(nodes));
  }
  return plan;
}

void apply_time_jump(SIRState& s, std::span<const double> nu_nodes) {
  auto vs = s.S.values();
  auto vr = s.R.values();
  for (std::size_t q = 0; q < vs.size(); ++q) {
    const double moved = nu_nodes[q] * vs[q];
    vs[q] -= moved;
    vr[q] += moved;
  }
}

Trajectory simulate(const Scenario& sc) {
  ValidationReport rep = validate_scenario(sc);
  if (!rep.valid) throw ConfigError("invalid scenario:\n" + rep.to_string());
  if (!rep.neg_eligible && !sc.config.allow_signed_rates)
    throw ConfigError(
        "signed rates or kernel require config allow_signed_rates (blow-up detection armed)");

  FixedPointOptions fp;
  fp.fp_tol = sc.config.fp_tol;
  fp.max_iter = sc.config.max_iter;
  fp.window_initial = sc.config.window_initial;
  fp.blowup_factor = sc.config.blowup_factor;
  fp.solver_tol = sc.config.solver_tol;
  fp.pos_tol = sc.config.pos_tol;

  const Grid& g = *sc.grid;
  Trajectory out;
  out.grid = sc.grid;

  auto append_states = [&](const SirSystem& sys, const SystemTrajectory& traj,
                           int from_step) {
    for (int k = from_step; k <= traj.steps(); ++k)
      out.states.push_back(sys.unpack(traj.state_at(k), traj.time(k)));
  };

  if (std::holds_alternative<AgeTriggeredPolicy>(sc.policy)) {
    SirSystem sys = build_system_age_triggered(sc);
    SystemState u0 = sys.pack(SIRState{sc.S_o, sc.I_o, sc.R_o, 0.0});
    GlobalSolution sol = solve_global(sys.spec, u0, 0.0, g.horizon(), fp);
    append_states(sys, sol.traj, 0);
    out.windows = sol.windows;
    out.status = sol.status;
    out.end_time = sol.end_time;
    out.diagnostic = sol.diagnostic;
  } else {
    TimeTriggeredPlan plan = build_system_time_triggered(sc);
    SIRState state{sc.S_o, sc.I_o, sc.R_o, 0.0};
    double t0 = 0.0;
    out.status = TerminationStatus::Completed;
    std::vector<double> stops = plan.jump_times;
    stops.push_back(g.horizon());
    for (std::size_t seg = 0; seg < stops.size(); ++seg) {
      const double t1 = stops[seg];
      SystemState u0 = plan.system.pack(state);
      GlobalSolution sol = solve_global(plan.system.spec, u0, t0, t1, fp);
      append_states(plan.system, sol.traj, seg == 0 ? 0 : 1);
      for (const auto& w : sol.windows) out.windows.push_back(w);
      if (sol.status == TerminationStatus::BlowUp) {
        out.status = sol.status;
        out.end_time = sol.end_time;
        out.diagnostic = sol.diagnostic;
        break;
      }
      state = out.states.back();
      out.end_time = t1;
      if (seg < plan.jump_times.size()) {
        out.prejump.emplace_back(t1, state);
        apply_time_jump(state, plan.nu_nodes[seg]);
        out.states.back() = state;
      }
      t0 = t1;
    }
  }

  if (out.status == TerminationStatus::Completed) {
    bool pos = false, neg = false;
    scan_eligibility(sc, pos, neg);
    if (pos) {
      double worst = 0.0;
      for (const auto& s : out.states) worst = std::min(worst, s.min_value());
      if (worst < -sc.config.pos_tol)
        throw SolverFailure("positivity violated: min nodal value " + std::to_string(worst));
    }
  }
  return out;
}

}  // namespace rsir

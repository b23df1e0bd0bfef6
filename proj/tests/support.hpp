#ifndef RSIR_TESTS_SUPPORT_HPP
#define RSIR_TESTS_SUPPORT_HPP

#include <memory>
#include <random>

#include "rsir/scenario_io.hpp"
#include "rsir/sir_model.hpp"

namespace rsir::testing {

inline std::shared_ptr<Grid> single_grid(double age_max, int cells, double horizon) {
  return std::make_shared<Grid>(age_max, cells, horizon);
}

inline GridFunction tent(std::shared_ptr<const Grid> g, double a0, double peak_at,
                         double a1, double peak) {
  return GridFunction::sample(g, [=](double a) {
    if (a <= a0 || a >= a1) return 0.0;
    if (a <= peak_at) return peak * (a - a0) / (peak_at - a0);
    return peak * (a1 - a) / (a1 - peak_at);
  });
}

inline ScenarioFileModel reference_model() {
  return parse_scenario_file(std::string(RSIR_SCENARIO_DIR) + "/reference.scn");
}

inline Scenario reference_scenario() { return build_scenario(reference_model()); }

inline ScenarioFileModel toy_model() {
  return parse_scenario_file(std::string(RSIR_SCENARIO_DIR) + "/toy_optimize.scn");
}

/// Seeded random scenario satisfying every hypothesis, with strictly
/// positive rates (dissipation margin) and data supported away from the
/// truncation boundary.
inline Scenario random_neg_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  auto pick = [&](std::initializer_list<int> xs) {
    std::vector<int> v(xs);
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  const double age_max = pick({8, 10, 12});
  const int cells = pick({4, 8});
  const double horizon = 5.0;

  // policy first: vaccination ages define the grid segments
  const int variant = pick({0, 1, 2});  // none / age / time
  std::vector<double> ages;
  if (variant == 1) {
    const int n_ages = pick({1, 2});
    double a = 0.0;
    for (int j = 0; j < n_ages; ++j) {
      a += std::round(uni(1.0, 2.5) * cells) / cells;
      ages.push_back(a);
    }
  }
  auto grid = std::make_shared<Grid>(age_max, cells, horizon, ages);

  Scenario sc{grid,
              {},
              {},
              AgeTriggeredPolicy{},
              GridFunction::zero(grid),
              GridFunction::zero(grid),
              GridFunction::zero(grid),
              {},
              {},
              {},
              {}};

  const double scale = uni(0.001, 0.01), s1 = uni(4.0, 10.0), s2 = uni(4.0, 10.0);
  sc.kernel.separable = true;
  sc.kernel.phi = [scale, s1](double a) { return scale * std::exp(-a / s1); };
  sc.kernel.psi = [s2](double ap) { return std::exp(-ap / s2); };
  sc.kernel.lambda = [scale, s1, s2](double a, double ap) {
    return scale * std::exp(-a / s1) * std::exp(-ap / s2);
  };
  sc.kernel.Lambda_inf = 2.5 * scale;
  sc.kernel.Lambda_L = 1.2 * scale / s1;

  const double dS = uni(0.02, 0.12), dI = uni(0.02, 0.15), dR = uni(0.02, 0.1),
               rI = uni(0.05, 0.15);
  sc.rates.d_S = [dS](double, double) { return dS; };
  sc.rates.d_I = [dI](double, double) { return dI; };
  sc.rates.d_R = [dR](double, double) { return dR; };
  sc.rates.r_I = [rI](double, double) { return rI; };
  sc.rates.R_inf = 0.25;
  sc.rates.R_L = 0.01;
  sc.rates.R_1 = 0.2 * age_max;

  const double hi = age_max - horizon - 0.5;
  const double sa = uni(0.3, 1.0), sb = uni(sa + 0.5, hi);
  sc.S_o = tent(grid, sa, 0.5 * (sa + sb), sb, uni(0.4, 1.4));
  sc.I_o = tent(grid, sa, 0.5 * (sa + sb), sb, uni(0.02, 0.25));
  sc.R_o = tent(grid, sa, 0.5 * (sa + sb), sb, uni(0.0, 0.3));
  sc.S_b = TimeSeries::constant(uni(0.0, 0.3));
  sc.I_b = TimeSeries::constant(uni(0.0, 0.04));
  sc.R_b = TimeSeries::constant(uni(0.0, 0.05));

  if (variant == 1) {
    AgeTriggeredPolicy p;
    p.ages = ages;
    for (std::size_t j = 0; j < ages.size(); ++j) {
      const double t_break = std::round(uni(1.0, 4.0) * cells) / cells;
      p.eta.emplace_back(std::vector<double>{0.0, t_break},
                         std::vector<double>{uni(0.0, 1.0), uni(0.0, 1.0)},
                         TimeSeries::Mode::PiecewiseConstant);
    }
    sc.policy = std::move(p);
  } else if (variant == 2) {
    TimeTriggeredPolicy p;
    const int n_times = pick({1, 2});
    double t = 0.5;
    for (int k = 0; k < n_times; ++k) {
      t += std::round(uni(0.5, 1.5) * cells) / cells;
      p.times.push_back(t);
      const double lo = uni(0.0, 0.6), hi2 = uni(lo, 1.0), mid = uni(1.0, age_max - 1.0);
      p.nu.push_back([lo, hi2, mid](double a) { return a < mid ? lo : hi2; });
    }
    sc.policy = std::move(p);
  }
  return sc;
}

}  // namespace rsir::testing

#endif

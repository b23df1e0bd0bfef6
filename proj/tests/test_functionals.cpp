#include <doctest.h>

#include <cmath>

#include "rsir/functionals.hpp"
#include "support.hpp"

using namespace rsir;

namespace {

// hand-built trajectory with constant states (no solver involved)
Trajectory constant_trajectory(std::shared_ptr<const Grid> g, double S, double I,
                               double R) {
  Trajectory tr;
  tr.grid = g;
  for (int k = 0; k <= g->time_steps(); ++k) {
    tr.states.push_back(SIRState{GridFunction::sample(g, [S](double) { return S; }),
                                 GridFunction::sample(g, [I](double) { return I; }),
                                 GridFunction::sample(g, [R](double) { return R; }),
                                 g->time_node(k)});
  }
  tr.end_time = g->horizon();
  return tr;
}

}  // namespace

TEST_CASE("age-triggered costs") {
  auto g = std::make_shared<Grid>(4.0, 4, 1.0, std::vector<double>{1.0});
  AgeTriggeredPolicy zero{{1.0}, {TimeSeries::constant(0.0)}};
  AgeTriggeredPolicy half{{1.0}, {TimeSeries::constant(0.5)}};

  Trajectory tr = constant_trajectory(g, 2.0, 0.0, 0.0);
  CHECK(cost_age_susceptible(tr, zero) == 0.0);
  // eta = 0.5 on [0,1], S(., a1-) = 2 -> integral = 1
  CHECK(cost_age_susceptible(tr, half) == doctest::Approx(1.0).epsilon(1e-14));
  // with I = R = 0 the whole-population cost coincides
  CHECK(cost_age_whole(tr, half) == doctest::Approx(1.0).epsilon(1e-14));

  Trajectory tr2 = constant_trajectory(g, 2.0, 0.3, 0.4);
  CHECK(cost_age_whole(tr2, half) >= cost_age_susceptible(tr2, half));
  CHECK(cost_age_whole(tr2, half) == doctest::Approx(0.5 * 2.7).epsilon(1e-14));
}

TEST_CASE("cost quadrature is stable under time refinement") {
  Scenario sc = testing::reference_scenario();
  Trajectory tr = simulate(sc);
  const auto& pol = std::get<AgeTriggeredPolicy>(sc.policy);
  const double coarse = cost_age_susceptible(tr, pol);

  // re-evaluate the time integral on half cells, interpolating the stored
  // traces linearly in time
  double refined = 0.0;
  for (std::size_t j = 0; j < pol.ages.size(); ++j) {
    const int ix = static_cast<int>(j) + 1;
    for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
      const double t0 = tr.states[k].time, t1 = tr.states[k + 1].time;
      const double s0 = tr.states[k].S.left_trace(ix);
      const double s1 = tr.states[k + 1].S.left_trace(ix);
      const double sm = 0.5 * (s0 + s1), tm = 0.5 * (t0 + t1);
      refined += pol.eta[j](0.5 * (t0 + tm)) * 0.25 * (t1 - t0) * (s0 + sm);
      refined += pol.eta[j](0.5 * (tm + t1)) * 0.25 * (t1 - t0) * (sm + s1);
    }
  }
  CHECK(std::abs(coarse - refined) <= 1e-4 * std::max(1.0, std::abs(refined)));
}

TEST_CASE("costs are monotone in the control on a frozen trajectory") {
  Scenario sc = testing::reference_scenario();
  Trajectory tr = simulate(sc);
  AgeTriggeredPolicy lo{{2.0, 4.0},
                        {TimeSeries::constant(0.2), TimeSeries::constant(0.1)}};
  AgeTriggeredPolicy hi{{2.0, 4.0},
                        {TimeSeries::constant(0.4), TimeSeries::constant(0.6)}};
  CHECK(cost_age_susceptible(tr, lo) <= cost_age_susceptible(tr, hi));
  CHECK(cost_age_whole(tr, lo) <= cost_age_whole(tr, hi));
  CHECK(cost_age_whole(tr, lo) >= cost_age_susceptible(tr, lo));
}

TEST_CASE("time-triggered costs read the pre-jump snapshots") {
  auto g = testing::single_grid(4.0, 4, 1.0);
  Trajectory tr;
  tr.grid = g;
  SIRState pre{GridFunction::sample(g, [](double) { return 0.75; }),
               GridFunction::sample(g, [](double) { return 0.5; }),
               GridFunction::zero(g), 0.5};
  tr.prejump.emplace_back(0.5, pre);

  TimeTriggeredPolicy full{{0.5}, {[](double) { return 1.0; }}};
  // S mass = 0.75 * 4 = 3
  CHECK(cost_time_susceptible(tr, full) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(cost_time_whole(tr, full) == doctest::Approx(5.0).epsilon(1e-14));

  TimeTriggeredPolicy zero{{0.5}, {[](double) { return 0.0; }}};
  CHECK(cost_time_susceptible(tr, zero) == 0.0);

  // band indicator with node-aligned edges: the edge half-cells sum to one
  // full cell, so the quadrature recovers the exact band mass of S
  TimeTriggeredPolicy band{{0.5}, {[](double a) { return (a >= 1.0 && a < 3.0) ? 1.0 : 0.0; }}};
  CHECK(cost_time_susceptible(tr, band) == doctest::Approx(0.75 * 2.0).epsilon(1e-14));

  TimeTriggeredPolicy mismatched{{0.25}, {[](double) { return 1.0; }}};
  CHECK_THROWS_AS(cost_time_susceptible(tr, mismatched), std::invalid_argument);
}

TEST_CASE("effect functional") {
  auto g = testing::single_grid(3.0, 4, 2.0);
  SUBCASE("zero infected, zero effect") {
    Trajectory tr = constant_trajectory(g, 1.0, 0.0, 0.0);
    CHECK(effect(tr) == 0.0);
  }
  SUBCASE("constant infected, unit weight") {
    Trajectory tr = constant_trajectory(g, 0.0, 0.7, 0.0);
    CHECK(effect(tr) == doctest::Approx(0.7 * 2.0 * 3.0).epsilon(1e-14));
  }
  SUBCASE("a late-window indicator equals the restricted integral") {
    Scenario sc = testing::reference_scenario();
    Trajectory tr = simulate(sc);
    const double T = sc.grid->horizon();
    EffectWeight late{[T](double t, double) { return t >= T / 2 ? 1.0 : 0.0; }, false};
    // independent evaluation: unit-weight effect of the truncated trajectory
    Trajectory second_half;
    second_half.grid = tr.grid;
    for (const auto& s : tr.states)
      if (s.time >= T / 2 - 1e-12) second_half.states.push_back(s);
    CHECK(effect(tr, late) == doctest::Approx(effect(second_half)).epsilon(1e-13));
  }
  SUBCASE("linearity in the weight") {
    Scenario sc = testing::reference_scenario();
    Trajectory tr = simulate(sc);
    EffectWeight w1{[](double t, double) { return 1.0 + 0.5 * std::sin(t); }, false};
    EffectWeight w2{[](double, double a) { return 0.3 * a; }, false};
    EffectWeight combo{[](double t, double a) {
                         return 2.0 * (1.0 + 0.5 * std::sin(t)) + 3.0 * (0.3 * a);
                       },
                       false};
    CHECK(effect(tr, combo) ==
          doctest::Approx(2.0 * effect(tr, w1) + 3.0 * effect(tr, w2)).epsilon(1e-12));
  }
}

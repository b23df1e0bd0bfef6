#include <doctest.h>

#include <cmath>
#include <random>

#include "rsir/grid.hpp"
#include "rsir/time_series.hpp"
#include "support.hpp"

using namespace rsir;

TEST_CASE("grid construction and alignment") {
  Grid g(10.0, 8, 5.0, {2.0, 4.0});
  CHECK(g.segments() == 3);
  CHECK(g.dt() == doctest::Approx(0.125));
  CHECK(g.time_steps() == 40);
  CHECK(g.segment_cells(0) == 16);
  CHECK(g.segment_cells(2) == 48);
  CHECK(g.total_nodes() == 17 + 17 + 49);
  CHECK(g.aligned(2.0));
  CHECK(!g.aligned(2.01));
  CHECK_THROWS_AS(Grid(10.0, 8, 5.0, {2.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(10.0, 8, 5.0, {2.05}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(10.0, 8, 5.03), std::invalid_argument);
}

TEST_CASE("l1 norm examples") {
  auto g0 = testing::single_grid(2.0, 10, 1.0);
  CHECK(GridFunction::zero(g0).l1() == 0.0);
  CHECK(GridFunction::sample(g0, [](double) { return 1.0; }).l1() ==
        doctest::Approx(2.0).epsilon(1e-14));

  auto g1 = testing::single_grid(10.0, 100, 1.0);  // 1000 cells
  auto f = GridFunction::sample(g1, [](double x) { return std::exp(-x); });
  CHECK(f.l1() == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-4));
}

TEST_CASE("total variation examples") {
  auto g = testing::single_grid(3.0, 1, 1.0);  // three cells
  GridFunction step(g, {0.0, 1.0, 0.0, 0.0});
  CHECK(step.tv() == doctest::Approx(2.0));

  auto g2 = testing::single_grid(5.0, 2, 1.0);
  auto ramp = GridFunction::sample(g2, [](double x) { return x; });
  CHECK(ramp.tv() == doctest::Approx(5.0));

  // one interface jump left=10 right=7, flat elsewhere
  auto gs = std::make_shared<Grid>(4.0, 2, 1.0, std::vector<double>{2.0});
  std::vector<double> v(gs->total_nodes());
  for (int i = 0; i < gs->segment_nodes(0); ++i) v[gs->segment_offset(0) + i] = 10.0;
  for (int i = 0; i < gs->segment_nodes(1); ++i) v[gs->segment_offset(1) + i] = 7.0;
  GridFunction jump(gs, v);
  CHECK(jump.tv() == doctest::Approx(3.0));
  CHECK(jump.left_trace(1) == 10.0);
  CHECK(jump.right_trace(1) == 7.0);
}

TEST_CASE("tv basic properties") {
  std::mt19937_64 rng(42);
  auto g = std::make_shared<Grid>(6.0, 4, 1.0, std::vector<double>{2.5});
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(g->total_nodes());
    for (double& x : v) x = std::uniform_real_distribution<double>(-2, 2)(rng);
    GridFunction f(g, v);
    for (double& x : v) x += 3.7;
    GridFunction shifted(g, v);
    CHECK(shifted.tv() == doctest::Approx(f.tv()).epsilon(1e-12));
    std::vector<double> neg(f.values().begin(), f.values().end());
    for (double& x : neg) x = -x;
    CHECK(GridFunction(g, neg).tv() == doctest::Approx(f.tv()).epsilon(1e-12));
  }
  CHECK(GridFunction::sample(g, [](double) { return 4.2; }).tv() == 0.0);
}

TEST_CASE("l1 and tv are preserved exactly under refinement") {
  std::mt19937_64 rng(7);
  auto coarse = std::make_shared<Grid>(6.0, 4, 1.0, std::vector<double>{2.0});
  auto fine = std::make_shared<Grid>(6.0, 8, 1.0, std::vector<double>{2.0});
  for (int rep = 0; rep < 20; ++rep) {
    // tv is preserved for any nodal function; l1 additionally needs a single
    // sign per cell (here: nonnegative values)
    std::vector<double> v(coarse->total_nodes());
    for (double& x : v) x = std::uniform_real_distribution<double>(0, 2)(rng);
    GridFunction f(coarse, v);
    GridFunction r = f.refined(fine);
    CHECK(r.l1() == doctest::Approx(f.l1()).epsilon(1e-13));
    CHECK(r.tv() == doctest::Approx(f.tv()).epsilon(1e-13));

    std::vector<double> vs(coarse->total_nodes());
    for (double& x : vs) x = std::uniform_real_distribution<double>(-1, 1)(rng);
    GridFunction fs(coarse, vs);
    CHECK(fs.refined(fine).tv() == doctest::Approx(fs.tv()).epsilon(1e-13));
  }
}

TEST_CASE("time series evaluation, tv and l1") {
  TimeSeries pc({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0}, TimeSeries::Mode::PiecewiseConstant);
  CHECK(pc(0.5) == 1.0);
  CHECK(pc(1.0) == 3.0);  // right-continuous
  CHECK(pc(1.0 - 1e-12) == 3.0);  // snapped onto the breakpoint
  CHECK(pc(5.0) == 2.0);
  CHECK(pc.tv(0.0, 3.0) == doctest::Approx(3.0));
  CHECK(pc.l1(0.0, 3.0) == doctest::Approx(1.0 + 3.0 + 2.0));
  CHECK(pc.sup(0.0, 3.0) == 3.0);

  TimeSeries pl({0.0, 2.0}, {-1.0, 1.0}, TimeSeries::Mode::PiecewiseLinear);
  CHECK(pl(1.0) == doctest::Approx(0.0));
  CHECK(pl.l1(0.0, 2.0) == doctest::Approx(1.0));  // two triangles
  CHECK(pl.tv(0.0, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("sir state totals") {
  auto g = testing::single_grid(4.0, 4, 1.0);
  SIRState s{GridFunction::sample(g, [](double) { return 1.0; }),
             GridFunction::sample(g, [](double) { return 0.5; }),
             GridFunction::zero(g), 0.0};
  CHECK(s.total_mass() == doctest::Approx(6.0));
  CHECK(s.min_value() == 0.0);
}

#include <doctest.h>

#include <cmath>

#include "rsir/sir_model.hpp"
#include "support.hpp"

using namespace rsir;

namespace {

Scenario zero_scenario(std::shared_ptr<const Grid> g) {
  return Scenario{g,
                  {},
                  {},
                  AgeTriggeredPolicy{},
                  GridFunction::zero(g),
                  GridFunction::zero(g),
                  GridFunction::zero(g),
                  {},
                  {},
                  {},
                  {}};
}

}  // namespace

TEST_CASE("plain sir on one segment (no vaccination ages)") {
  auto g = testing::single_grid(6.0, 4, 1.0);
  Scenario sc = zero_scenario(g);
  SirSystem sys = build_system_age_triggered(sc);
  CHECK(sys.spec.n == 3);
  sys.spec.validate();
}

TEST_CASE("interface rules implement the vaccination arithmetic") {
  auto g = std::make_shared<Grid>(6.0, 4, 1.0, std::vector<double>{2.0});
  Scenario sc = zero_scenario(g);
  AgeTriggeredPolicy pol;
  pol.ages = {2.0};
  pol.eta = {TimeSeries::constant(0.3)};
  sc.policy = pol;
  SirSystem sys = build_system_age_triggered(sc);
  CHECK(sys.spec.n == 6);

  // S trace 10 at the interface: segment-2 S boundary flux 7, R gains 3
  std::vector<double> trS{10.0};
  CHECK(sys.spec.beta[3].flux(0.0, trS) == doctest::Approx(7.0));
  std::vector<double> trI{4.0};
  CHECK(sys.spec.beta[4].flux(0.0, trI) == doctest::Approx(4.0));
  std::vector<double> trSR{10.0, 1.5};
  CHECK(sys.spec.beta[5].flux(0.0, trSR) == doctest::Approx(3.0 + 1.5));

  // eta == 0 reduces to pass-through traces
  AgeTriggeredPolicy pol0;
  pol0.ages = {2.0};
  pol0.eta = {TimeSeries::constant(0.0)};
  sc.policy = pol0;
  SirSystem sys0 = build_system_age_triggered(sc);
  CHECK(sys0.spec.beta[3].flux(1.0, trS) == doctest::Approx(10.0));
  CHECK(sys0.spec.beta[5].flux(1.0, trSR) == doctest::Approx(1.5));
}

TEST_CASE("time-triggered restart arithmetic") {
  auto g = testing::single_grid(6.0, 4, 2.0);
  Scenario sc = zero_scenario(g);

  SUBCASE("full coverage moves all susceptibles") {
    SIRState s{GridFunction::sample(g, [](double) { return 4.0; }),
               GridFunction::zero(g),
               GridFunction::sample(g, [](double) { return 1.0; }), 0.0};
    std::vector<double> nu(g->total_nodes(), 1.0);
    apply_time_jump(s, nu);
    CHECK(s.S.linf() == 0.0);
    CHECK(s.R.min_value() == doctest::Approx(5.0));
  }
  SUBCASE("band indicator moves the band only") {
    SIRState s{GridFunction::sample(g, [](double) { return 4.0; }),
               GridFunction::zero(g), GridFunction::zero(g), 0.0};
    std::vector<double> nu(g->total_nodes(), 0.0);
    for (int i = 0; i < g->total_nodes(); ++i) {
      const double a = i * g->cell_width();
      if (a >= 2.0 && a <= 3.0) nu[i] = 1.0;
    }
    apply_time_jump(s, nu);
    for (int i = 0; i < g->total_nodes(); ++i) {
      const double a = i * g->cell_width();
      if (a >= 2.0 && a <= 3.0) {
        CHECK(s.S[i] == 0.0);
        CHECK(s.R[i] == 4.0);
      } else {
        CHECK(s.S[i] == 4.0);
        CHECK(s.R[i] == 0.0);
      }
    }
  }
  SUBCASE("zero coverage is the identity") {
    SIRState s{GridFunction::sample(g, [](double a) { return a; }),
               GridFunction::zero(g), GridFunction::zero(g), 0.0};
    std::vector<double> before(s.S.values().begin(), s.S.values().end());
    std::vector<double> nu(g->total_nodes(), 0.0);
    apply_time_jump(s, nu);
    for (int i = 0; i < g->total_nodes(); ++i) CHECK(s.S[i] == before[i]);
  }
}

TEST_CASE("decoupled scenario transports its data") {
  auto g = testing::single_grid(6.0, 8, 1.0);
  Scenario sc = zero_scenario(g);
  sc.S_o = testing::tent(g, 1.0, 2.0, 3.0, 1.0);
  sc.I_o = testing::tent(g, 1.0, 1.5, 2.0, 0.4);
  sc.R_o = testing::tent(g, 2.0, 3.0, 4.0, 0.2);
  Trajectory tr = simulate(sc);
  REQUIRE(tr.status == TerminationStatus::Completed);
  const SIRState& fin = tr.states.back();
  for (int i = 0; i < g->total_nodes(); ++i) {
    const double a = i * g->cell_width();
    const double shifted = a - 1.0;
    CHECK(fin.S[i] == doctest::Approx(shifted < 0 ? 0.0 : sc.S_o[g->node_index(shifted)])
                          .epsilon(1e-12));
    CHECK(fin.I[i] == doctest::Approx(shifted < 0 ? 0.0 : sc.I_o[g->node_index(shifted)])
                          .epsilon(1e-12));
  }
}

TEST_CASE("no infection source keeps I at zero") {
  Scenario sc = testing::reference_scenario();
  sc.I_o = GridFunction::zero(sc.grid);
  sc.I_b = TimeSeries::constant(0.0);
  Trajectory tr = simulate(sc);
  for (const auto& s : tr.states) CHECK(s.I.linf() == 0.0);
}

TEST_CASE("age-triggered jump relations hold at every output time") {
  Scenario sc = testing::reference_scenario();
  Trajectory tr = simulate(sc);
  const auto& pol = std::get<AgeTriggeredPolicy>(sc.policy);
  double worst = 0.0, worst_sum = 0.0;
  // the t = 0 row is the raw initial datum; the interface relations
  // constrain the evolution (a.e. t > 0)
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    const auto& s = tr.states[k];
    for (std::size_t j = 0; j < pol.ages.size(); ++j) {
      const int ix = static_cast<int>(j) + 1;
      const double eta = pol.eta[j](s.time);
      worst = std::max(worst, std::abs(s.S.right_trace(ix) -
                                       (1.0 - eta) * s.S.left_trace(ix)));
      worst = std::max(worst, std::abs(s.I.right_trace(ix) - s.I.left_trace(ix)));
      worst = std::max(worst, std::abs(s.R.right_trace(ix) - s.R.left_trace(ix) -
                                       eta * s.S.left_trace(ix)));
      const double sum_l =
          s.S.left_trace(ix) + s.I.left_trace(ix) + s.R.left_trace(ix);
      const double sum_r =
          s.S.right_trace(ix) + s.I.right_trace(ix) + s.R.right_trace(ix);
      worst_sum = std::max(worst_sum, std::abs(sum_r - sum_l));
    }
  }
  CHECK(worst < 1e-8);
  CHECK(worst_sum < 1e-8);
}

TEST_CASE("time-triggered jumps are algebraically exact and snapshots persist") {
  auto g = testing::single_grid(8.0, 4, 2.0);
  Scenario sc = zero_scenario(g);
  sc.S_o = testing::tent(g, 0.5, 1.5, 3.0, 1.0);
  sc.I_o = testing::tent(g, 0.5, 1.0, 2.0, 0.2);
  TimeTriggeredPolicy pol;
  pol.times = {0.5, 1.25};
  pol.nu = {[](double a) { return a < 3.0 ? 0.6 : 0.1; },
            [](double) { return 0.25; }};
  sc.policy = pol;
  Trajectory tr = simulate(sc);
  REQUIRE(tr.prejump.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& [tk, pre] = tr.prejump[k];
    const int step = static_cast<int>(std::llround(tk / g->dt()));
    const SIRState& post = tr.states[step];
    for (int i = 0; i < g->total_nodes(); ++i) {
      const double nu = pol.nu[k](i * g->cell_width());
      CHECK(std::abs(post.S[i] - (1.0 - nu) * pre.S[i]) < 1e-14);
      CHECK(std::abs(post.I[i] - pre.I[i]) < 1e-14);
      CHECK(std::abs(post.R[i] - (pre.R[i] + nu * pre.S[i])) < 1e-14);
    }
  }
}

TEST_CASE("population bound with dissipative rates") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    Scenario sc = testing::random_neg_scenario(seed);
    Trajectory tr = simulate(sc);
    REQUIRE(tr.status == TerminationStatus::Completed);
    const double init = tr.states.front().total_mass();
    for (const auto& s : tr.states) {
      const double inflow = sc.S_b.l1(0, s.time) + sc.I_b.l1(0, s.time) +
                            sc.R_b.l1(0, s.time);
      const double steps = s.time / sc.grid->dt();
      CHECK(s.total_mass() <= init + inflow + 1e-8 * steps + 1e-12);
      CHECK(s.min_value() >= -1e-10);
    }
  }
}

TEST_CASE("policy variants with inactive controls coincide") {
  auto g = std::make_shared<Grid>(8.0, 4, 2.0, std::vector<double>{2.0});
  Scenario base = zero_scenario(g);
  base.S_o = testing::tent(g, 0.5, 1.5, 3.0, 1.0);
  base.I_o = testing::tent(g, 0.5, 1.0, 2.0, 0.2);
  base.S_b = TimeSeries::constant(0.1);
  base.kernel.separable = true;
  base.kernel.phi = [](double) { return 0.01; };
  base.kernel.psi = [](double) { return 1.0; };
  base.kernel.lambda = [](double, double) { return 0.01; };
  base.kernel.Lambda_inf = 0.02;
  base.kernel.Lambda_L = 0.01;
  base.rates.d_S = [](double, double) { return 0.05; };
  base.rates.d_I = [](double, double) { return 0.05; };
  base.rates.d_R = [](double, double) { return 0.05; };
  base.rates.r_I = [](double, double) { return 0.1; };
  base.rates.R_inf = 0.2;
  base.rates.R_L = 0.01;
  base.rates.R_1 = 1.0;

  Scenario sa = base;
  AgeTriggeredPolicy pa;
  pa.ages = {2.0};
  pa.eta = {TimeSeries::constant(0.0)};
  sa.policy = pa;

  Scenario st = base;
  TimeTriggeredPolicy pt;
  pt.times = {1.0};
  pt.nu = {[](double) { return 0.0; }};
  st.policy = pt;

  Trajectory ta = simulate(sa), tt = simulate(st);
  REQUIRE(ta.states.size() == tt.states.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < ta.states.size(); ++k) {
    auto va = ta.states[k].S.values();
    auto vt = tt.states[k].S.values();
    for (std::size_t i = 0; i < va.size(); ++i)
      worst = std::max(worst, std::abs(va[i] - vt[i]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("the recovered pool does not feed back") {
  Scenario a = testing::reference_scenario();
  Scenario b = testing::reference_scenario();
  b.R_o = testing::tent(b.grid, 0.5, 2.0, 4.0, 0.7);
  Trajectory ta = simulate(a), tb = simulate(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < ta.states.size(); ++k) {
    auto sa = ta.states[k].S.values();
    auto sb = tb.states[k].S.values();
    auto ia = ta.states[k].I.values();
    auto ib = tb.states[k].I.values();
    for (std::size_t i = 0; i < sa.size(); ++i) {
      worst = std::max(worst, std::abs(sa[i] - sb[i]));
      worst = std::max(worst, std::abs(ia[i] - ib[i]));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("scenario validation") {
  SUBCASE("all-zero scenario is valid and dissipative") {
    auto g = testing::single_grid(4.0, 2, 1.0);
    auto rep = validate_scenario(zero_scenario(g));
    CHECK(rep.valid);
    CHECK(rep.neg_eligible);
    CHECK(rep.pos_eligible);
  }
  SUBCASE("a signed rate only costs the dissipativity flag") {
    auto g = testing::single_grid(4.0, 2, 1.0);
    Scenario sc = zero_scenario(g);
    sc.rates.d_S = [](double, double) { return -0.1; };
    sc.rates.R_inf = 0.2;
    sc.rates.R_L = 0.01;
    sc.rates.R_1 = 1.0;
    auto rep = validate_scenario(sc);
    CHECK(rep.valid);
    CHECK(!rep.neg_eligible);
    bool warned = false;
    for (const auto& i : rep.issues) warned = warned || i.code == "neg_eligibility";
    CHECK(warned);
    // simulation refuses the missing guarantee unless explicitly allowed
    CHECK_THROWS_AS(simulate(sc), ConfigError);
    sc.config.allow_signed_rates = true;
    CHECK_NOTHROW(simulate(sc));
  }
  SUBCASE("an understated kernel constant is located") {
    auto g = testing::single_grid(4.0, 2, 1.0);
    Scenario sc = zero_scenario(g);
    sc.kernel.lambda = [](double, double) { return 1.2; };
    sc.kernel.separable = true;
    sc.kernel.phi = [](double) { return 1.2; };
    sc.kernel.psi = [](double) { return 1.0; };
    sc.kernel.Lambda_inf = 1.0;  // understated
    sc.kernel.Lambda_L = 0.1;
    auto rep = validate_scenario(sc);
    CHECK(!rep.valid);
    bool found = false;
    for (const auto& i : rep.issues)
      found = found || (i.error && i.code == "lambda_inf" && !i.message.empty());
    CHECK(found);
  }
  SUBCASE("misaligned vaccination ages are a configuration error") {
    auto g = std::make_shared<Grid>(4.0, 2, 1.0, std::vector<double>{2.0});
    Scenario sc = zero_scenario(g);
    AgeTriggeredPolicy p;
    p.ages = {1.5};  // not the grid interface
    p.eta = {TimeSeries::constant(0.0)};
    sc.policy = p;
    auto rep = validate_scenario(sc);
    CHECK(!rep.valid);
    CHECK_THROWS_AS(build_system_age_triggered(sc), ConfigError);
  }
}

TEST_CASE("mass near the truncation boundary draws a warning") {
  auto g = testing::single_grid(6.0, 4, 1.0);
  Scenario sc = zero_scenario(g);
  sc.S_o = GridFunction::sample(g, [](double a) { return a > 5.8 ? 1.0 : 0.0; });
  auto rep = validate_scenario(sc);
  CHECK(rep.valid);  // a warning, not an error
  bool tail = false, horizon = false;
  for (const auto& i : rep.issues) {
    tail = tail || i.code == "truncation_tail";
    horizon = horizon || i.code == "truncation_horizon";
  }
  CHECK(tail);
  CHECK(horizon);
}

TEST_CASE("the dissipativity sum telescopes on random nonnegative states") {
  std::mt19937_64 rng(77);
  Scenario sc = testing::reference_scenario();
  SirSystem sys = build_system_age_triggered(sc);
  for (int rep = 0; rep < 10; ++rep) {
    SystemState u;
    u.comp.resize(sys.spec.n);
    for (int i = 0; i < sys.spec.n; ++i) {
      u.comp[i].resize(sys.spec.meshes[i].nodes);
      for (double& v : u.comp[i])
        v = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    }
    const double t = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    CHECK(check_neg_condition(sys.spec, u, t).holds);
  }
}

TEST_CASE("random scenarios pass their own validation") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario sc = testing::random_neg_scenario(seed);
    auto rep = validate_scenario(sc);
    CHECK(rep.valid);
    CHECK(rep.neg_eligible);
  }
}

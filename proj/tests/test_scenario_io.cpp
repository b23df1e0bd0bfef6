#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rsir/scenario_io.hpp"
#include "support.hpp"

using namespace rsir;

TEST_CASE("minimal file parses to the zero scenario") {
  ScenarioFileModel m =
      parse_scenario_file(std::string(RSIR_SCENARIO_DIR) + "/minimal.scn");
  Scenario sc = build_scenario(m);
  CHECK(sc.grid->age_max() == 4.0);
  CHECK(sc.S_o.l1() == 0.0);
  CHECK(sc.I_o.l1() == 0.0);
  CHECK(sc.kernel.lambda(1.0, 2.0) == 0.0);
  CHECK(validate_scenario(sc).valid);
  Trajectory tr = simulate(sc);
  for (const auto& s : tr.states) CHECK(s.total_mass() == 0.0);
}

TEST_CASE("unknown keys and malformed lines are rejected by name") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_scenario_text(text, "test");
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("[grid]\nage_mox = 5\n", "age_mox");
  expect_error("[gird]\n", "unknown section");
  expect_error("age_max = 5\n", "outside any section");
  expect_error("[grid]\nage_max 5\n", "expected key = value");
  expect_error("[data]\nS_o = table 2:1 1:0\n", "keys must increase");
  expect_error("[data]\nS_o = parabola\n", "expected zero | constant | table");
  expect_error("[optimize]\ncost_variant = cheapest\n", "cost_variant");
}

TEST_CASE("golden reference scenario resolves to its documented values") {
  ScenarioFileModel m = testing::reference_model();
  CHECK(m.grid.age_max == 10.0);
  CHECK(m.grid.cells_per_unit_age == 8);
  CHECK(m.grid.horizon == 5.0);
  CHECK(m.kernel.form == "separable");
  CHECK(m.kernel.scale == 0.012);
  CHECK(m.kernel.lambda_inf == 0.03);
  CHECK(m.rates.r_I.value == 0.12);
  CHECK(m.policy.variant == "age");
  CHECK(m.policy.ages == std::vector<double>{2.0, 4.0});
  REQUIRE(m.policy.controls.size() == 2);
  CHECK(m.policy.controls[1].keys == std::vector<double>{0.0, 2.5});
  CHECK(m.optimize.budget == 60);

  Scenario sc = build_scenario(m);
  CHECK(sc.kernel.lambda(0.0, 2.0) == doctest::Approx(0.012));
  CHECK(sc.rates.d_I(0.0, 10.0) == doctest::Approx(0.05));
  CHECK(std::get<AgeTriggeredPolicy>(sc.policy).eta[1](3.0) == doctest::Approx(0.2));
}

TEST_CASE("serialize / parse round trip is the identity") {
  for (const char* name : {"/reference.scn", "/toy_optimize.scn", "/minimal.scn"}) {
    ScenarioFileModel m = parse_scenario_file(std::string(RSIR_SCENARIO_DIR) + name);
    std::string text = serialize_scenario(m);
    ScenarioFileModel back = parse_scenario_text(text, "echo");
    CHECK(back == m);
    // a second echo is byte-identical
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("tabulated kernels interpolate bilinearly") {
  std::string text =
      "[kernel]\nform = tabulated\nages = 0 10\nages_prime = 0 10\n"
      "row_1 = 1 3\nrow_2 = 2 4\nlambda_inf = 8\nlambda_lip = 1\n";
  ScenarioFileModel m = parse_scenario_text(text, "test");
  Scenario sc = build_scenario(m);
  CHECK(sc.kernel.lambda(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(sc.kernel.lambda(10.0, 10.0) == doctest::Approx(4.0));
  CHECK(sc.kernel.lambda(5.0, 5.0) == doctest::Approx(2.5));
  CHECK(!sc.kernel.separable);
}

TEST_CASE("product rates and bare separable kernels survive the round trip") {
  std::string text =
      "[kernel]\nform = separable\nscale = 0.5\nlambda_inf = 1\nlambda_lip = 1\n"
      "[rates]\nr_I = product 0:1 5:0.5 x 0:0.1 10:0.2\n"
      "rate_inf = 2\nrate_l1 = 5\nrate_lip = 1\n";
  ScenarioFileModel m = parse_scenario_text(text, "test");
  CHECK(m.kernel.phi.keys == std::vector<double>{0.0});  // defaulted factor
  ScenarioFileModel back = parse_scenario_text(serialize_scenario(m), "echo");
  CHECK(back == m);

  Scenario sc = build_scenario(m);
  CHECK(sc.kernel.lambda(3.0, 7.0) == doctest::Approx(0.5));
  // r_I(t, a) = f(t) g(a), both linear
  CHECK(sc.rates.r_I(0.0, 0.0) == doctest::Approx(0.1));
  CHECK(sc.rates.r_I(5.0, 10.0) == doctest::Approx(0.5 * 0.2));
  CHECK(sc.rates.r_I(2.5, 5.0) == doctest::Approx(0.75 * 0.15));
}

TEST_CASE("tabulated kernels survive the round trip") {
  std::string text =
      "[kernel]\nform = tabulated\nages = 0 10\nages_prime = 0 5 10\n"
      "row_1 = 1 3 2\nrow_2 = 2 4 1\nlambda_inf = 9\nlambda_lip = 1\n";
  ScenarioFileModel m = parse_scenario_text(text, "test");
  ScenarioFileModel back = parse_scenario_text(serialize_scenario(m), "echo");
  CHECK(back == m);
}

TEST_CASE("time-triggered policy files build and run") {
  std::string text =
      "[grid]\nage_max = 6\ncells_per_unit_age = 4\nhorizon = 1.5\n"
      "[rates]\nd_S = constant 0.02\nd_I = constant 0.02\nd_R = constant 0.02\n"
      "r_I = constant 0.1\nrate_inf = 0.3\nrate_l1 = 1\nrate_lip = 0.1\n"
      "[data]\nS_o = table 0:0 1:1 2:0 6:0\n"
      "[policy]\nvariant = time\ntimes = 0.5 1\n"
      "nu_1 = table 0:0.4\nnu_2 = table 0:0 2:0.8 4:0\n";
  ScenarioFileModel m = parse_scenario_text(text, "test");
  CHECK(parse_scenario_text(serialize_scenario(m), "echo") == m);
  Scenario sc = build_scenario(m);
  const auto& tp = std::get<TimeTriggeredPolicy>(sc.policy);
  CHECK(tp.times == std::vector<double>{0.5, 1.0});
  CHECK(tp.nu[1](3.0) == doctest::Approx(0.8));
  CHECK(tp.nu[1](1.0) == doctest::Approx(0.0));
  Trajectory tr = simulate(sc);
  CHECK(tr.prejump.size() == 2);
  CHECK(tr.status == TerminationStatus::Completed);
}

TEST_CASE("csv writers produce the documented schemas") {
  Scenario sc = testing::reference_scenario();
  Trajectory tr = simulate(sc);
  const std::string dir = "/tmp/rsir_io_test";
  std::remove((dir + "_traj.csv").c_str());
  write_trajectory_csv(dir + "_traj.csv", tr, 20);
  write_summary_csv(dir + "_summary.csv", tr);

  std::ifstream t(dir + "_traj.csv");
  std::string header;
  std::getline(t, header);
  CHECK(header == "t,a,side,S,I,R");
  // interface nodes appear twice, flagged - and +
  int minus = 0, plus = 0;
  std::string line;
  while (std::getline(t, line)) {
    if (line.find(",-,") != std::string::npos) ++minus;
    if (line.find(",+,") != std::string::npos) ++plus;
  }
  CHECK(minus > 0);
  CHECK(minus == plus);

  std::ifstream s(dir + "_summary.csv");
  std::getline(s, header);
  CHECK(header == "t,L1_S,L1_I,L1_R,TV_S,TV_I,TV_R,mass_total");
  int rows = 0;
  while (std::getline(s, line)) ++rows;
  CHECK(rows == tr.steps() + 1);
}

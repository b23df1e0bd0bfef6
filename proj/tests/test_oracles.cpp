#include <doctest.h>

#include <cmath>

#include "rsir/oracles.hpp"
#include "support.hpp"

using namespace rsir;

TEST_CASE("the self-amplifying closed form") {
  auto c = blowup_case();
  CHECK(c.closed_form(0.0, 0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
  CHECK(c.closed_form(0.5, 1.0) == doctest::Approx(1.726635).epsilon(1e-5));
  // L1 norm along the solution: 1 / (2 - e^t)
  CHECK(c.l1_norm(0.6) == doctest::Approx(1.0 / (2.0 - std::exp(0.6))).epsilon(1e-14));
  CHECK(c.l1_norm(0.0) == doctest::Approx(1.0));
}

TEST_CASE("transport translations") {
  auto shift_indicator = transport_case(
      [](double x) { return (x >= 1.0 && x <= 2.0) ? 1.0 : 0.0; });
  OracleRun r1 = run_oracle(shift_indicator, 6.0, 8, 0.5);
  CHECK(r1.rel_linf_err == 0.0);

  auto ramp = transport_case([](double x) { return x < 3.0 ? 0.5 * x : 0.0; });
  OracleRun r2 = run_oracle(ramp, 6.0, 8, 0.75);
  CHECK(r2.rel_linf_err < 1e-13);

  auto zero = transport_case([](double) { return 0.0; });
  OracleRun r3 = run_oracle(zero, 6.0, 8, 0.5);
  CHECK(r3.l1_value == 0.0);
}

TEST_CASE("decay matches its closed form") {
  auto c0 = decay_case(0.0, [](double x) { return (x >= 1.0 && x <= 2.0) ? 1.0 : 0.0; });
  OracleRun r0 = run_oracle(c0, 6.0, 8, 0.5);
  CHECK(r0.rel_linf_err == 0.0);  // mu = 0 reduces to transport

  auto c1 = decay_case(1.0, [](double x) { return (x >= 1.0 && x <= 2.0) ? 1.0 : 0.0; });
  CHECK(c1.closed_form(0.5, 1.7) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  OracleRun r1 = run_oracle(c1, 6.0, 200, 0.5);
  CHECK(r1.rel_linf_err < 1e-6);

  // the discrete mass decays exactly by e^{-mu t} (support node-aligned)
  const auto& row0 = r1.solution.traj.comp[0][0];
  double mass0 = 0.0;
  const double h = 6.0 / (row0.size() - 1);
  for (std::size_t i = 0; i + 1 < row0.size(); ++i)
    mass0 += 0.5 * h * (row0[i] + row0[i + 1]);
  CHECK(r1.l1_value / mass0 == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("blow-up oracle through the solver") {
  OracleRun r = run_oracle(blowup_case(), 12.0, 200, 0.5);
  CHECK(r.solution.status == TerminationStatus::Completed);
  CHECK(r.rel_linf_err < 4e-3);  // coarser grid than the acceptance run
  CHECK(std::abs(r.l1_value - r.l1_exact) < 2e-2);
}

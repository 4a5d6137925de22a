#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpca/prox_oracle.hpp"

TEST_CASE("grid_minimize", "[oracle]") {
  SECTION("dead zone returns zero") {
    const auto g = fpca::grid_minimize(1.0, 0.125, 0.1);
    CHECK(g.beta == 0.0);
  }
  SECTION("finds the frozen minimizer to grid accuracy") {
    const auto g = fpca::grid_minimize(1.0, 0.1, 2.0);
    CHECK(std::abs(g.beta - 1.9888054983652885) <= 2e-6);
  }
  SECTION("rejects a bad step") {
    CHECK_THROWS_AS(fpca::grid_minimize(1.0, 0.1, 2.0, 0.0), fpca::ArgumentError);
  }
}

TEST_CASE("check_prox accepts the closed form", "[oracle]") {
  const auto summary = fpca::check_prox(200, 4, 1e-6);
  CHECK(summary.samples.size() == 200);
  CHECK(summary.failures == 0);
  CHECK(summary.max_objective_gap <= 1e-9);
  CHECK(summary.max_argument_gap <= 2e-4);

  std::ostringstream report;
  fpca::write_prox_report(report, summary);
  const std::string text = report.str();
  CHECK(text.rfind("a,tau,gamma,prox,grid_argmin,objective_gap,argument_gap,pass\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 201);
}

TEST_CASE("check_prox flags a faulty prox", "[oracle]") {
  // Wrong branch of the cubic: the other root of the stationarity equation.
  const fpca::ProxFunction faulty = [](const fpca::PenaltyParams& p, double gamma) {
    if (std::abs(gamma) <= fpca::threshold_value(p)) return 0.0;
    return fpca::detail::g_root_impl(p, gamma, -1.0);
  };
  const auto summary = fpca::check_prox(200, 4, 1e-6, faulty);
  CHECK(summary.failures > 0);

  const fpca::ProxFunction zero = [](const fpca::PenaltyParams&, double) { return 0.0; };
  CHECK(fpca::check_prox(50, 4, 1e-6, zero).failures > 0);
}

TEST_CASE("check_prox with no samples", "[oracle]") {
  const auto summary = fpca::check_prox(0, 0);
  CHECK(summary.samples.empty());
  CHECK(summary.failures == 0);
  CHECK_THROWS_AS(fpca::check_prox(-1, 0), fpca::ArgumentError);
}

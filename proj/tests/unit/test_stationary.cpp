#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mfnet/stationary.hpp"

using namespace mfnet;
using mfnet::test::one_population;

namespace {

NetworkSpec fig2(double g) { return one_population(0.25, 0.0, Tanh{g}, 1.0, 1.0, 0.0, 0.0, 0.01); }

}  // namespace

TEST_CASE("stationary grid defaults") {
  const auto grid = stationary_grid(fig2(1.0), {});
  CHECK(grid.last() == doctest::Approx(10.0));
  CHECK(grid.size() <= 401);
  StationaryOptions o;
  o.dt = 0.01;
  CHECK(stationary_grid(fig2(1.0), o).dt() == 0.01);
}

TEST_CASE("OU stationary profile") {
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0);
  StationaryOptions o;
  o.dt = 0.05;
  const auto r = run_stationary(spec, o);
  REQUIRE(r.profile.populations() == 1);
  CHECK(r.profile.c0[0] == doctest::Approx(0.5).epsilon(1e-6));
  for (std::size_t k = 0; k < r.profile.lags.size(); ++k) {
    CHECK(std::abs(r.profile.c_of_tau[0][k] - 0.5 * std::exp(-r.profile.lags[k])) <= 3.0 * o.dt);
  }
  CHECK(r.profile.stationarity_defect < 1e-5);
  CHECK(r.regime == Regime::kChaotic);  // noise alone keeps C(0) above the threshold
}

TEST_CASE("small slope is trivial") {
  const auto r = run_stationary(fig2(0.5));
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 30);
  CHECK(r.regime == Regime::kTrivial);
  for (double c : r.profile.c_of_tau[0]) CHECK(std::abs(c) < 1e-3);
  CHECK(r.profile.stationarity_defect < 1e-5);
}

TEST_CASE("classification threshold") {
  StationaryProfile p;
  p.c0 = {1e-4, 2e-3};
  CHECK(classify_regime(p) == Regime::kChaotic);
  CHECK(classify_regime(p, 1e-2) == Regime::kTrivial);
  CHECK(to_string(Regime::kTrivial) == "trivial");
}

TEST_CASE("preconditions") {
  auto spec = fig2(1.0);
  spec.populations[0].input = SinusoidInput{0.0, 1.0, 2.0};
  const auto pre = check_stationary_preconditions(spec);
  CHECK_FALSE(pre.ok);
  REQUIRE_FALSE(pre.reasons.empty());
  CHECK(pre.reasons.front().find("populations[0]") != std::string::npos);
  CHECK_THROWS_AS(run_stationary(spec), std::invalid_argument);
  CHECK(check_stationary_preconditions(fig2(1.0)).ok);
}

TEST_CASE("burn-in must leave samples") {
  MomentState st(TimeGrid(0.0, 1.0, 0.1), 1);
  CHECK_THROWS_AS(extract_profile(st, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_profile(st, -0.1), std::invalid_argument);
  CHECK_NOTHROW(extract_profile(st, 0.5));
}

TEST_CASE("bisection needs a bracket") {
  auto spec = fig2(1.0);
  spec.connectivity.sigma(0, 0) = 0.0;  // no disorder: trivial at every slope
  StationaryOptions o;
  o.horizon_factor = 8.0;
  o.burn_in_factor = 4.0;
  CHECK_THROWS_AS(find_gc(spec, 1.0, 6.0, 0.5, o), UnbracketedError);
}

TEST_CASE("slope template") {
  const auto s = spec_with_slope(fig2(1.0), 3.0);
  CHECK(std::get<Tanh>(s.populations[0].sigmoid).g == 3.0);
}

TEST_CASE("a slow drift does not break monotone lag profiles") {
  // C(t, s) = (1 + 0.05 max(i, j)) e^{-|t - s|}: decreasing in the lag at every t
  const TimeGrid grid(0.0, 4.0, 0.01);
  MomentState st(grid, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) st.cov[0](i, j) = (1.0 + 0.05 * i) * std::exp(-(grid[i] - grid[j]));
  }
  const auto p = extract_profile(st, 2.0);
  REQUIRE(p.lags.size() == 201);
  for (std::size_t k = 1; k < p.lags.size(); ++k) CHECK(p.c_of_tau[0][k] < p.c_of_tau[0][k - 1]);
  CHECK(p.stationarity_defect > 0.0);
}

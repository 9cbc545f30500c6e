#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mfnet/model.hpp"
#include "mfnet/spec_io.hpp"

using namespace mfnet;
using mfnet::test::one_population;

TEST_CASE("sigmoid values") {
  CHECK(eval_sigmoid(Logistic{2.0, 1.0, 0.5}, 1.0) == doctest::Approx(1.0));
  CHECK(eval_sigmoid(ErfForm{1.0, 0.0}, 0.0) == doctest::Approx(0.5));
  CHECK(eval_sigmoid(Tanh{2.0}, 0.3) == doctest::Approx(std::tanh(0.6)));
  CHECK(eval_sigmoid(SqrtClassI{2.0, 1.0}, 0.5) == 0.0);
  CHECK(eval_sigmoid(SqrtClassI{2.0, 1.0}, 5.0) == doctest::Approx(4.0));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429));
}

TEST_CASE("sigmoid properties") {
  CHECK(sigmoid_is_odd(Tanh{3.0}));
  CHECK_FALSE(sigmoid_is_odd(Logistic{}));
  CHECK(sigmoid_bound(Tanh{3.0}) == 1.0);
  CHECK(sigmoid_bound(Logistic{2.5, 0.0, 1.0}) == 2.5);
  CHECK_FALSE(sigmoid_bound(SqrtClassI{}).has_value());
  CHECK(sigmoid_kind(ErfForm{}) == "erf");
}

TEST_CASE("fast tanh tracks std::tanh") {
  for (double y = -30.0; y <= 30.0; y += 0.0137) CHECK(std::abs(fast_tanh(y) - std::tanh(y)) < 4e-16);
}

TEST_CASE("with_slope") {
  CHECK(std::get<Tanh>(with_slope(Tanh{1.0}, 3.0)).g == 3.0);
  CHECK(std::get<ErfForm>(with_slope(ErfForm{1.0, 0.4}, 2.0)).gamma == 0.4);
  CHECK(std::get<Logistic>(with_slope(Logistic{}, 4.0)).v_s == 0.25);
  CHECK(std::get<SqrtClassI>(with_slope(SqrtClassI{2.0, 1.0}, 9.0)).c == 2.0);
}

TEST_CASE("inputs") {
  const PiecewiseConstantInput pw{{1.0, 2.0}, {0.0, 5.0, -1.0}};
  CHECK(eval_input(pw, 0.5) == 0.0);
  CHECK(eval_input(pw, 1.0) == 5.0);
  CHECK(eval_input(pw, 3.0) == -1.0);
  CHECK(eval_input(SinusoidInput{1.0, 2.0, 4.0}, 1.0) == doctest::Approx(3.0));
  CHECK(input_is_constant(ConstantInput{2.0}));
  CHECK_FALSE(input_is_constant(SinusoidInput{0.0, 1.0, 1.0}));
}

TEST_CASE("valid spec passes unchanged") {
  const auto spec = one_population(1.0, 0.5, Tanh{1.0}, 1.0, 1.0);
  const auto r = validate_spec(spec);
  REQUIRE(r.ok());
  CHECK(r.spec->populations.front().f == 0.5);
  CHECK_NOTHROW(require_valid(spec));
}

TEST_CASE("every violation is reported with its path") {
  auto spec = one_population(-1.0, -0.5, Tanh{1.0}, 1.0, -1.0, 0.0, 0.0, -0.1);
  const auto r = validate_spec(spec);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.spec.has_value());
  bool tau = false, f = false, var = false, sig = false;
  for (const auto& i : r.issues) {
    tau |= i.kind == IssueKind::kNonPositiveTimeConstant && i.path == "populations[0].tau";
    f |= i.kind == IssueKind::kNegativeNoise;
    var |= i.kind == IssueKind::kNegativeVariance;
    sig |= i.kind == IssueKind::kNegativeDispersion;
  }
  CHECK(tau);
  CHECK(f);
  CHECK(var);
  CHECK(sig);
  CHECK_THROWS_AS(require_valid(spec), SpecError);
}

TEST_CASE("dimension mismatch and non-finite values") {
  auto spec = one_population(1.0, 0.0, Tanh{1.0}, 1.0, 1.0);
  spec.connectivity.j_bar = Eigen::MatrixXd::Zero(2, 2);
  CHECK_FALSE(validate_spec(spec).ok());
  spec = one_population(1.0, 0.0, Tanh{NAN}, 1.0, 1.0);
  CHECK_FALSE(validate_spec(spec).ok());
  NetworkSpec empty;
  CHECK_FALSE(validate_spec(empty).ok());
}

TEST_CASE("time grid") {
  const TimeGrid g(0.0, 5.0, 0.01);
  CHECK(g.size() == 501);
  CHECK(g.last() == doctest::Approx(5.0));
  CHECK_THROWS_AS(TimeGrid(0.0, 0.001, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, -0.1), std::invalid_argument);
  const auto spec = one_population(0.25, 0.0, Tanh{1.0}, 1.0, 1.0);
  CHECK(default_dt(spec, 0.0, 1.0) == doctest::Approx(0.0025));
  const double wide = default_dt(spec, 0.0, 100.0, 401);
  CHECK(TimeGrid(0.0, 100.0, wide).size() <= 401);
}

TEST_CASE("spec json round trip") {
  NetworkSpec spec = one_population(0.5, 0.2, Logistic{2.0, 0.1, 0.3}, 1.5, 0.7, 0.0, 0.3, 0.01);
  spec.populations[0].input = PiecewiseConstantInput{{1.0}, {0.0, 2.0}};
  const auto back = spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
}

TEST_CASE("config errors name the field") {
  auto j = to_json(one_population(1.0, 0.0, Tanh{1.0}, 1.0, 1.0));
  j["populations"][0]["sigmoid"]["kind"] = "cubic";
  try {
    spec_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("populations[0].sigmoid.kind") != std::string::npos);
  }
  j = to_json(one_population(1.0, 0.0, Tanh{1.0}, 1.0, 1.0));
  j.erase("j_bar");
  CHECK_THROWS_AS(spec_from_json(j), ConfigError);
}

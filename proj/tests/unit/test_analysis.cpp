#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "mfnet/analysis.hpp"
#include "mfnet/mc.hpp"

using namespace mfnet;
using mfnet::test::one_population;
using mfnet::test::two_populations;

namespace {

Eigen::Matrix2d rotation_like() {
  Eigen::Matrix2d j;
  j << 1.0, -2.0, 2.0, 1.0;
  return j;
}

std::vector<double> sine(double amp, double period, double dt, std::size_t n, double decay = 0.0) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i * dt;
    s[i] = 0.3 + amp * std::exp(-decay * t) * std::sin(2.0 * std::numbers::pi * t / period);
  }
  return s;
}

}  // namespace

TEST_CASE("eigenvalues agree with a general solver") {
  for (std::uint32_t k = 0; k < 100; ++k) {
    Eigen::Matrix2d j;
    const auto a = normal_pair(17, {k, 0, 0, 0});
    const auto b = normal_pair(17, {k, 1, 0, 0});
    j << a[0], a[1], b[0], b[1];
    const auto e = jacobian_eigs(j, 0.7, 1.3);
    Eigen::EigenSolver<Eigen::Matrix2d> es(j);
    for (const auto& ref : {es.eigenvalues()(0), es.eigenvalues()(1)}) {
      const double d = std::min(std::abs(e.lambda[0] - ref), std::abs(e.lambda[1] - ref));
      CHECK(d < 1e-10);
    }
    for (int i = 0; i < 2; ++i) CHECK(std::abs(e.system[i] - (-1.0 / 0.7 + 1.3 * e.lambda[i])) < 1e-12);
  }
  CHECK_THROWS_AS(jacobian_eigs(Eigen::MatrixXd::Zero(3, 3), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("hopf threshold") {
  const auto h = hopf_threshold(rotation_like(), 1.0);
  REQUIRE(h.g_c.has_value());
  CHECK(*h.g_c == 1.0);
  CHECK(is_feedback_loop(rotation_like()));
  Eigen::Matrix2d sym;
  sym << 1.0, 0.5, 0.5, 1.0;
  CHECK_FALSE(is_feedback_loop(sym));
  CHECK_FALSE(hopf_threshold(sym, 1.0).g_c.has_value());
  Eigen::Matrix2d neg = rotation_like();
  neg.diagonal() *= -1.0;
  const auto hn = hopf_threshold(neg, 1.0);
  CHECK_FALSE(hn.g_c.has_value());
  CHECK(hn.reason.find("trace") != std::string::npos);
  // on the threshold the real part of the system eigenvalues vanishes
  CHECK(std::abs(jacobian_eigs(rotation_like(), 1.0, 1.0).system[0].real()) < 1e-15);
}

TEST_CASE("h factor") {
  const auto r = gh_rule(40);
  CHECK(h_factor(0.0, r) == 1.0);
  double prev = 1.0;
  for (double v = 0.1; v < 20.0; v *= 1.5) {
    const double h = h_factor(v, r);
    CHECK(h < prev);
    CHECK(h > 0.0);
    prev = h;
  }
  // sampling oracle at v = 1 and on the Simpson branch
  for (double v : {1.0, 9.0}) {
    const std::uint32_t n = 400000;
    double s = 0.0, s2 = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double y = std::tanh(std::sqrt(v) * normal_pair(8, {i, 0, 0, 0})[0]);
      s += y * y;
      s2 += y * y * y * y;
    }
    const double m = s / n;
    const double se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::abs(h_factor(v, r) - (1.0 - m)) < 5.0 * se);
  }
}

TEST_CASE("oscillation detection on synthetic series") {
  const double dt = 0.01;
  auto osc = detect_oscillation(sine(0.2, 2.5, dt, 4000), dt, 10.0);
  REQUIRE(osc.has_value());
  CHECK(osc->amplitude == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(osc->period == doctest::Approx(2.5).epsilon(1e-3));
  CHECK_FALSE(detect_oscillation(sine(1e-5, 2.5, dt, 4000), dt, 10.0).has_value());
  CHECK_FALSE(detect_oscillation(sine(0.5, 2.5, dt, 4000, 0.2), dt, 10.0).has_value());
  CHECK_FALSE(detect_oscillation(std::vector<double>(4000, 1.0), dt, 10.0).has_value());
  CHECK_THROWS_AS(detect_oscillation(sine(0.2, 2.5, dt, 100), dt, 0.95), std::invalid_argument);
  CHECK(dominant_period(sine(0.2, 2.5, dt, 4000), dt, 10.0) == doctest::Approx(2.5).epsilon(1e-2));
}

TEST_CASE("deterministic two-population model oscillates past the threshold") {
  const TimeGrid grid(0.0, 60.0, 0.01);
  for (double g : {0.8, 1.2}) {
    const auto spec = two_populations(1.0, Tanh{g}, rotation_like());
    const auto wc = wilson_cowan_solve(spec, grid);
    std::vector<double> s(wc.cols());
    for (Eigen::Index i = 0; i < wc.cols(); ++i) s[i] = wc(0, i);
    const auto osc = detect_oscillation(s, grid.dt(), 20.0);
    CHECK(osc.has_value() == (g > 1.0));
    if (osc) CHECK(osc->amplitude > 1e-3);
  }
}

TEST_CASE("sweep parameters") {
  CHECK(sweep_parameter_from_string("sigma_scale") == SweepParameter::kSigmaScale);
  CHECK(to_string(SweepParameter::kJScale) == "j_scale");
  CHECK_THROWS_AS(sweep_parameter_from_string("tau"), std::invalid_argument);
  const auto spec = one_population(1.0, 0.5, Tanh{1.0}, 2.0, 3.0);
  CHECK(apply_parameter(spec, SweepParameter::kSigmaScale, 0.5).connectivity.sigma(0, 0) == 1.5);
  CHECK(apply_parameter(spec, SweepParameter::kFScale, 2.0).populations[0].f == 1.0);
  CHECK(apply_parameter(spec, SweepParameter::kJScale, 2.0).connectivity.j_bar(0, 0) == 4.0);
  CHECK(std::get<Tanh>(apply_parameter(spec, SweepParameter::kG, 7.0).populations[0].sigmoid).g == 7.0);
}

TEST_CASE("sweep grid validation") {
  const auto spec = one_population(1.0, 0.0, Tanh{1.0}, 1.0, 0.0);
  CHECK_THROWS_AS(sweep(spec, SweepParameter::kG, {}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(spec, SweepParameter::kG, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("sweep of one point matches a direct solve") {
  const auto spec = one_population(1.0, 0.0, Logistic{1.0, 0.0, 0.5}, 1.0, 0.0, -0.5);
  SweepOptions o;
  o.t_end = 20.0;
  o.t1 = 15.0;
  o.t2 = 20.0;
  const auto r = sweep(spec, SweepParameter::kG, {2.0}, o);
  REQUIRE(r.points.size() == 1);
  const auto& p = r.points.front();
  CHECK(p.converged);
  CHECK(p.regime == "single");
  const auto wc = wilson_cowan_solve(apply_parameter(spec, SweepParameter::kG, 2.0), TimeGrid(0.0, 20.0, 0.2));
  CHECK(p.mean_plus[0] == doctest::Approx(wc(0, wc.cols() - 1)).epsilon(1e-3));
}

TEST_CASE("deterministic pitchfork splits the branches") {
  const auto spec = one_population(1.0, 0.0, Logistic{1.0, 0.0, 1.0}, 1.0, 0.0, -0.5);
  const auto r = sweep(spec, SweepParameter::kG, {2.0, 6.0});
  CHECK(r.points[0].regime == "single");
  CHECK(r.points[1].regime == "split");
  CHECK(branch_split_value(r) == 6.0);
}

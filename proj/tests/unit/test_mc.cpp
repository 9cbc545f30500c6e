#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "mfnet/mc.hpp"

using namespace mfnet;
using mfnet::test::one_population;

TEST_CASE("philox known answer and counter sensitivity") {
  const auto w = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(w[0] == 0x6627e8d5u);
  CHECK(w[1] == 0xe169c58du);
  CHECK(w[2] == 0xbc57ac4cu);
  CHECK(w[3] == 0x9b00dbd8u);
  CHECK(philox4x32({1, 0, 0, 0}, {0, 0}) != w);
  CHECK(philox4x32({0, 0, 0, 0}, {1, 0}) != w);
}

TEST_CASE("normal pairs have unit moments") {
  const std::uint32_t n = 200000;
  double m = 0.0, v = 0.0, c = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto z = normal_pair(5, {i, 1, 2, 3});
    m += z[0] + z[1];
    v += z[0] * z[0] + z[1] * z[1];
    c += z[0] * z[1];
  }
  CHECK(std::abs(m / (2 * n)) < 4.0 / std::sqrt(2.0 * n));
  CHECK(std::abs(v / (2 * n) - 1.0) < 4.0 * std::sqrt(2.0 / (2 * n)));
  CHECK(std::abs(c / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("weight sampling") {
  ConnectivityStats st{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 0.0)};
  auto w = sample_weights(st, {10}, 1, 0);
  CHECK((w.array() == 0.2).all());

  st.sigma(0, 0) = 1.5;
  const std::size_t n = 400;
  w = sample_weights(st, {n}, 3, 0);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / (w.size() - 1.0);
  CHECK(std::abs(mean - 2.0 / n) < 4.0 * 1.5 / std::sqrt(double(n)) / n);
  CHECK(var * n == doctest::Approx(2.25).epsilon(0.02));
  CHECK(sample_weights(st, {n}, 3, 0) == w);
  CHECK(sample_weights(st, {n}, 3, 1) != w);
  CHECK(sample_weights(st, {n}, 4, 0) != w);
}

TEST_CASE("two-population weights scale with the presynaptic size") {
  ConnectivityStats st{Eigen::MatrixXd::Constant(2, 2, 1.0), Eigen::MatrixXd::Zero(2, 2)};
  st.j_bar(0, 1) = -3.0;
  const auto w = sample_weights(st, {3, 5}, 1, 0);
  REQUIRE(w.rows() == 8);
  CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(w(0, 4) == doctest::Approx(-3.0 / 5.0));
  CHECK(w(6, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(neuron_populations({2, 3}) == std::vector<std::size_t>{0, 0, 1, 1, 1});
}

TEST_CASE("checkpoints and config validation") {
  CHECK(default_checkpoints(101, 10).back() == 100);
  CHECK(default_checkpoints(101, 10).size() == 10);
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0);
  McConfig mc;
  mc.sizes = {5, 5};
  CHECK_THROWS_AS(validate_mc_config(mc, spec), std::invalid_argument);
  mc.sizes = {5};
  mc.trials = 1;
  CHECK_THROWS_AS(validate_mc_config(mc, spec), std::invalid_argument);
  mc.trials = 10;
  CHECK_NOTHROW(validate_mc_config(mc, spec));
  CHECK(substeps(mc, TimeGrid(0.0, 1.0, 0.1)) == 5);
}

TEST_CASE("OU network matches its closed form") {
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0, 0.5, 0.2, 0.1);
  const TimeGrid grid(0.0, 2.0, 0.05);
  McConfig mc;
  mc.sizes = {40};
  mc.trials = 100;
  mc.seed = 11;
  mc.dt_sde = 0.001;
  const auto m = run_monte_carlo(spec, grid, mc);
  const auto [st, rep] = solve_fixed_point(spec, grid);
  const auto cmp = compare_mc_mf(spec, m, st);
  CHECK(cmp.max_z_mean < 4.0);
  CHECK(cmp.max_z_var < 4.0);
  CHECK(m.variance[0].back().value == doctest::Approx(ou_covariance(1.0, 1.0, 0.1, 2.0, 2.0)).epsilon(0.05));
}

TEST_CASE("noise-free identical neurons follow Wilson-Cowan") {
  const auto spec = one_population(1.0, 0.0, Tanh{1.5}, 1.0, 0.0, 0.2, 0.3, 0.0);
  const TimeGrid grid(0.0, 2.0, 0.1);
  McConfig mc;
  mc.sizes = {4};
  mc.trials = 2;
  mc.dt_sde = 1e-4;
  const auto ens = simulate_ensemble(spec, grid, mc);
  const auto wc = wilson_cowan_solve(spec, grid);
  for (const auto& traj : ens.trajectories) {
    for (Eigen::Index i = 0; i < traj.rows(); ++i) CHECK((traj.row(i) - wc.row(0)).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("monte carlo is reproducible and schedule independent") {
  const auto spec = one_population(1.0, 1.0, Tanh{0.5}, 1.0, 1.0, 0.3, 0.5, 0.2);
  const TimeGrid grid(0.0, 1.0, 0.05);
  McConfig mc;
  mc.sizes = {20};
  mc.trials = 8;
  mc.seed = 42;
  const auto a = run_monte_carlo(spec, grid, mc);
  mc.threads = 3;
  const auto b = run_monte_carlo(spec, grid, mc);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.mean[0][i].value == b.mean[0][i].value);
    CHECK(a.variance[0][i].se == b.variance[0][i].se);
  }
  CHECK(a.corr_vu_summary == b.corr_vu_summary);
  mc.seed = 43;
  CHECK(run_monte_carlo(spec, grid, mc).mean[0].back().value != a.mean[0].back().value);
}

TEST_CASE("frozen weights are shared by every trial") {
  const auto spec = one_population(1.0, 1.0, Tanh{0.5}, 1.0, 1.0);
  McConfig mc;
  mc.sizes = {6};
  mc.trials = 3;
  mc.resample_weights_per_trial = false;
  const auto ens = simulate_ensemble(spec, TimeGrid(0.0, 1.0, 0.1), mc);
  CHECK(ens.weights.size() == 1);
  CHECK(ens.trajectories.size() == 3);
  // stored ensemble and streaming reduction agree
  const auto direct = run_monte_carlo(spec, ens.grid, mc);
  const auto stored = empirical_moments(spec, ens);
  CHECK(direct.mean[0].back().value == stored.mean[0].back().value);
}

TEST_CASE("unstable integration is reported") {
  const auto spec = one_population(0.01, 0.0, Tanh{1.0}, 0.0, 0.0, 0.0, 1.0);
  McConfig mc;
  mc.sizes = {2};
  mc.trials = 2;
  mc.dt_sde = 0.1;
  CHECK_THROWS_AS(run_monte_carlo(spec, TimeGrid(0.0, 100.0, 1.0), mc), DivergenceError);
}

TEST_CASE("comparison needs matching grids") {
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0);
  McConfig mc;
  mc.sizes = {3};
  mc.trials = 2;
  const auto m = run_monte_carlo(spec, TimeGrid(0.0, 1.0, 0.1), mc);
  const auto [st, rep] = solve_fixed_point(spec, TimeGrid(0.0, 1.0, 0.05));
  CHECK_THROWS_AS(compare_mc_mf(spec, m, st), std::invalid_argument);
}

TEST_CASE("weight block statistics at N = 400") {
  ConnectivityStats st{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  const auto w = sample_weights(st, {400}, 21, 0);
  const double n = static_cast<double>(w.size());
  const double mean = w.mean();
  const double sd = std::sqrt((w.array() - mean).square().sum() / (n - 1.0));
  CHECK(std::abs(mean - 1.0 / 400.0) < 4.0 * (1.0 / 20.0) / std::sqrt(n));
  CHECK(sd == doctest::Approx(1.0 / 20.0).epsilon(0.1));
}

TEST_CASE("uncoupled noise-free neurons decay exponentially") {
  const auto spec = one_population(1.0, 0.0, Tanh{1.0}, 0.0, 0.0, 0.0, 1.0, 0.0);
  const TimeGrid grid(0.0, 3.0, 0.1);
  McConfig mc;
  mc.sizes = {3};
  mc.trials = 2;
  mc.dt_sde = 0.001;
  const auto ens = simulate_ensemble(spec, grid, mc);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(ens.trajectories[0](0, i) - std::exp(-grid[i])) < 2.0 * mc.dt_sde);
}

TEST_CASE("OU variance at two time constants") {
  const auto spec = one_population(0.5, 1.0, Tanh{1.0}, 0.0, 0.0);
  const TimeGrid grid(0.0, 1.0, 0.05);
  McConfig mc;
  mc.sizes = {1};
  mc.trials = 2000;
  mc.seed = 5;
  mc.dt_sde = 0.0005;
  const auto m = run_monte_carlo(spec, grid, mc);
  const auto& v = m.variance[0].back();
  CHECK(std::abs(v.value - 0.25 * (1.0 - std::exp(-4.0))) < 4.0 * v.se);
}

TEST_CASE("zero noise and fixed weights give zero spread") {
  const auto spec = one_population(1.0, 0.0, Tanh{1.0}, 1.0, 0.0, 0.2, 0.4, 0.0);
  const TimeGrid grid(0.0, 1.0, 0.1);
  McConfig mc;
  mc.sizes = {5};
  mc.trials = 3;
  const auto m = run_monte_carlo(spec, grid, mc);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(m.variance[0][i].value == 0.0);
    CHECK(m.variance[0][i].se == 0.0);
    CHECK(m.mean[0][i].se == 0.0);
  }
}

TEST_CASE("fabricated moments from the mean-field state give z = 0") {
  const auto spec = one_population(1.0, 0.5, Tanh{0.8}, 1.0, 1.0, 0.1, 0.3, 0.1);
  const TimeGrid grid(0.0, 1.0, 0.1);
  const auto [st, rep] = solve_fixed_point(spec, grid);
  const auto rule = gh_rule(kDefaultGhOrder);
  EmpiricalMoments m;
  m.grid = grid;
  m.trials = 100;
  m.sizes = {100};
  m.checkpoints = default_checkpoints(grid.size());
  m.mean.assign(1, {});
  m.variance.assign(1, {});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m.mean[0].push_back({st.mu(0, i), 0.1});
    m.variance[0].push_back({st.variance(0, i), 0.1});
  }
  m.u_mean.assign(1, {});
  m.u_var.assign(1, {});
  for (auto i : m.checkpoints) {
    const double mu = st.mu(0, i), v = st.variance(0, i);
    m.u_mean[0].push_back({gauss_expect(Tanh{0.8}, mu, v, rule), 0.1});
    m.u_var[0].push_back({delta_kernel(Tanh{0.8}, {mu, mu, v, v, v, false}, rule), 0.1});
  }
  const auto cmp = compare_mc_mf(spec, m, st);
  CHECK(cmp.max_z == 0.0);
}

TEST_CASE("standard errors shrink as one over root trials") {
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0);
  const TimeGrid grid(0.0, 1.0, 0.1);
  McConfig mc;
  mc.sizes = {10};
  mc.trials = 100;
  const double se100 = run_monte_carlo(spec, grid, mc).mean[0].back().se;
  mc.trials = 400;
  const double se400 = run_monte_carlo(spec, grid, mc).mean[0].back().se;
  CHECK(se100 / se400 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("interaction mean agrees with the mean field at N = 200") {
  const auto spec = one_population(1.0, 1.0, Tanh{0.5}, 1.0, 1.0, 0.3, 0.5, 0.2);
  const TimeGrid grid(0.0, 2.0, 0.02);
  SolverOptions so;
  so.tol = 1e-9;
  const auto [st, rep] = solve_fixed_point(spec, grid, so);
  McConfig mc;
  mc.sizes = {200};
  mc.trials = 100;
  mc.seed = 42;
  const auto cmp = compare_mc_mf(spec, run_monte_carlo(spec, grid, mc), st);
  CHECK(cmp.max_z_u_mean <= 4.0);
  CHECK(cmp.max_z_mean <= 4.0);
  CHECK(cmp.max_z_var <= 4.0);
}

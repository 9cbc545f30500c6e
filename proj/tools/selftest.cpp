#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mfnet/artifacts.hpp"
#include "mfnet/mc.hpp"
#include "mfnet/meanfield.hpp"
#include "mfnet/quadrature.hpp"

namespace mfnet::cli {

namespace {

struct Check {
  std::string name;
  std::function<double()> error;  // measured error
  double limit;
};

NetworkSpec one_population(double tau, double f, Sigmoid s, double jbar, double sigma) {
  NetworkSpec spec;
  spec.populations = {{tau, f, s, ConstantInput{0.0}}};
  spec.connectivity.j_bar = Eigen::MatrixXd::Constant(1, 1, jbar);
  spec.connectivity.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  spec.initial_mean = {0.0};
  spec.initial_variance = {0.0};
  return spec;
}

double gh_moment_error() {
  const auto r = gh_rule(20);
  double e = 0.0;
  const double exact[] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0};
  for (int k = 0; k <= 6; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    e = std::max(e, std::abs(s - exact[k]));
  }
  return e;
}

double erf_mean_error() {
  const auto r = gh_rule(40);
  double e = 0.0;
  for (double g : {0.5, 2.0}) {
    for (double mu : {-1.0, 0.0, 0.7}) {
      for (double v : {0.0, 0.3, 1.0}) {
        e = std::max(e, std::abs(erf_mean_closed(g, 1.0, mu, v) - gauss_expect(ErfForm{g, 1.0}, mu, v, r)));
      }
    }
  }
  return e;
}

double erf_delta_error() {
  const auto r = gh_rule(40);
  const BivariateGaussianStats st{0.2, -0.4, 0.8, 0.5, 0.3, false};
  return std::abs(erf_delta_closed(1.5, 0.5, st, r) - delta_kernel(ErfForm{1.5, 0.5}, st, r));
}

double ou_solve_error() {
  const auto spec = one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0);
  const TimeGrid grid(0.0, 2.0, 0.02);
  const auto [st, rep] = solve_fixed_point(spec, grid);
  double e = rep.iterations <= 2 ? 0.0 : 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) e = std::max(e, std::abs(st.cov[0](i, j) - ou_covariance(1.0, 1.0, 0.0, grid[i], grid[j])));
  }
  return e;
}

double interaction_error() {
  // constant sigmoid: H(t,s) = c^2 tau^2 (1 - e^{-t/tau})(1 - e^{-s/tau}); error is first order in dt
  const double c = normal_cdf(0.5);
  const auto spec = one_population(1.0, 0.0, ErfForm{0.0, 0.5}, 0.0, 1.0);
  const TimeGrid grid(0.0, 2.0, 0.01);
  const auto [st, rep] = solve_fixed_point(spec, grid);
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double h = c * c * (1.0 - std::exp(-grid[i])) * (1.0 - std::exp(-grid[j]));
      e = std::max(e, std::abs(st.cov[0](i, j) - h));
    }
  }
  return e / grid.dt();
}

double wilson_cowan_error() {
  NetworkSpec spec;
  spec.populations = {{1.0, 0.0, Tanh{1.5}, ConstantInput{0.0}}, {1.0, 0.0, Tanh{1.5}, ConstantInput{0.1}}};
  spec.connectivity.j_bar.resize(2, 2);
  spec.connectivity.j_bar << 1.0, -2.0, 2.0, 1.0;
  spec.connectivity.sigma = Eigen::MatrixXd::Zero(2, 2);
  spec.initial_mean = {0.1, 0.0};
  spec.initial_variance = {0.0, 0.0};
  const TimeGrid grid(0.0, 3.0, 0.005);
  SolverOptions o;
  o.tol = 1e-12;
  o.max_iter = 100;
  const auto [st, rep] = solve_fixed_point(spec, grid, o);
  return (st.mu - wilson_cowan_solve(spec, grid)).cwiseAbs().maxCoeff();
}

double philox_error() {
  // published known-answer vector for Philox4x32-10 with zero counter and key
  const auto w = philox4x32({0, 0, 0, 0}, {0, 0});
  const std::uint32_t expect[] = {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  double e = 0.0;
  for (int k = 0; k < 4; ++k) e += w[k] == expect[k] ? 0.0 : 1.0;
  return e;
}

}  // namespace

int cmd_selftest(std::ostream& log) {
  const std::vector<Check> checks = {
      {"gauss-hermite moments (order 20)", gh_moment_error, 1e-10},
      {"odd sigmoid expectation at zero mean", [] { return std::abs(gauss_expect(Tanh{3.0}, 0.0, 0.7, gh_rule(40))); }, 0.0},
      {"erf mean closed form vs quadrature", erf_mean_error, 1e-8},
      {"erf pair moment closed form vs quadrature", erf_delta_error, 1e-8},
      {"stationary OU variance", [] { return std::abs(ou_covariance(1.0, 1.0, 0.0, 20.0, 20.0) - 0.5); }, 1e-8},
      {"zero-coupling solve equals OU covariance", ou_solve_error, 1e-12},
      {"interaction recursion, error / dt", interaction_error, 5.0},
      {"deterministic limit equals Wilson-Cowan", wilson_cowan_error, 1e-8},
      {"philox known answer", philox_error, 0.0},
  };
  bool ok = true;
  for (const auto& c : checks) {
    double err = 0.0;
    bool pass = false;
    try {
      err = c.error();
      pass = err <= c.limit;
    } catch (const std::exception& e) {
      log << "  error in " << c.name << ": " << e.what() << '\n';
    }
    log << (pass ? "PASS " : "FAIL ") << c.name << "  (error " << format_double(err) << ", limit "
        << format_double(c.limit) << ")\n";
    ok = ok && pass;
  }
  log << (ok ? "selftest passed\n" : "selftest failed\n");
  return ok ? kOk : kNotConverged;
}

}  // namespace mfnet::cli

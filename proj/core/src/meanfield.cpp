#include "mfnet/meanfield.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mfnet/parallel.hpp"

namespace mfnet {

namespace detail {

double midpoint_value(const double* samples, std::size_t n, std::size_t i) noexcept {
  if (n < 4) return 0.5 * (samples[i] + samples[i + 1]);
  if (i == 0) {
    return (5.0 * samples[0] + 15.0 * samples[1] - 5.0 * samples[2] + samples[3]) / 16.0;
  }
  if (i + 2 >= n) {
    return (samples[n - 4] - 5.0 * samples[n - 3] + 15.0 * samples[n - 2] + 5.0 * samples[n - 1]) / 16.0;
  }
  return (-samples[i - 1] + 9.0 * samples[i] + 9.0 * samples[i + 1] - samples[i + 2]) / 16.0;
}

SymmetricMatrix integrate_interaction(const SymmetricMatrix& delta, double tau, double dt) {
  const std::size_t n = delta.size();
  SymmetricMatrix h(n, 0.0);
  std::vector<double> d(n, 0.0);
  const double decay = 1.0 - dt / tau;
  const double decay2 = 1.0 - 2.0 * dt / tau;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // D(t_i, s_j) for j <= i, from D(t_i, 0) = 0
    const double* drow = delta.row(i);
    d[0] = 0.0;
    for (std::size_t j = 0; j < i; ++j) d[j + 1] = d[j] * decay + drow[j] * dt;

    const double* hprev = h.row(i);
    double* hnext = h.row(i + 1);
    for (std::size_t j = 0; j <= i; ++j) hnext[j] = hprev[j] * decay + d[j] * dt;
    hnext[i + 1] = hprev[i] * decay2 + 2.0 * d[i] * dt;
  }
  return h;
}

Eigen::MatrixXd integrate_interaction_dense(const SymmetricMatrix& delta, double tau, double dt) {
  const auto n = static_cast<Eigen::Index>(delta.size());
  const double decay = 1.0 - dt / tau;
  const double decay2 = 1.0 - 2.0 * dt / tau;

  // D(t_i, s_j) for every pair.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j + 1 < n; ++j)
      d(i, j + 1) = d(i, j) * decay + delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * dt;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) h(k + 1, k + 1) = h(k, k) * decay2 + 2.0 * d(k, k) * dt;
  // t > s: march in t down each column.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i + 1 < n; ++i) h(i + 1, j) = h(i, j) * decay + d(i, j) * dt;
  // t < s: march in s along each row, using D(s, t).
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j + 1 < n; ++j) h(i, j + 1) = h(i, j) * decay + d(j, i) * dt;
  return h;
}

}  // namespace detail

namespace {

struct Moments {
  std::vector<double> mu;   // grid values
  std::vector<double> var;  // grid values
  std::vector<double> mu_mid;
  std::vector<double> var_mid;
};

Moments population_moments(const MomentState& state, std::size_t a) {
  const std::size_t n = state.grid.size();
  Moments m;
  m.mu.resize(n);
  m.var.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.mu[i] = state.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i));
    m.var[i] = std::max(state.variance(a, i), 0.0);
  }
  m.mu_mid.resize(n - 1);
  m.var_mid.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m.mu_mid[i] = detail::midpoint_value(m.mu.data(), n, i);
    m.var_mid[i] = std::max(detail::midpoint_value(m.var.data(), n, i), 0.0);
  }
  return m;
}

double rate(const Sigmoid& s, double mu, double v, const GhRule& rule, const ApplyOptions& opts) {
  if (opts.use_erf_closed_form) {
    if (const auto* e = std::get_if<ErfForm>(&s)) return erf_mean_closed(e->g, e->gamma, mu, v);
  }
  return gauss_expect(s, mu, v, rule);
}

double pair_moment(const Sigmoid& s, const BivariateGaussianStats& st, const GhRule& rule, const ApplyOptions& opts) {
  if (opts.use_erf_closed_form) {
    if (const auto* e = std::get_if<ErfForm>(&s)) return erf_delta_closed(e->g, e->gamma, st, rule);
  }
  return delta_kernel(s, st, rule);
}

void check_compatible(const NetworkSpec& spec, const MomentState& state) {
  if (state.populations() != spec.size() || static_cast<std::size_t>(state.mu.rows()) != spec.size()) {
    throw std::invalid_argument("moment state has " + std::to_string(state.populations()) +
                                " populations, spec has " + std::to_string(spec.size()));
  }
  if (static_cast<std::size_t>(state.mu.cols()) != state.grid.size()) {
    throw std::invalid_argument("moment state mean does not match its grid");
  }
  for (const auto& c : state.cov) {
    if (c.size() != state.grid.size()) throw std::invalid_argument("moment state covariance does not match its grid");
  }
}

// RK4 for d mu/dt = -mu/tau + forcing(t) with forcing known at grid points and midpoints.
void integrate_mean(double tau, double mu0, const std::vector<double>& forcing, const std::vector<double>& forcing_mid,
                    double dt, double* out) {
  const std::size_t n = forcing.size();
  out[0] = mu0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double m = out[i];
    const double k1 = -m / tau + forcing[i];
    const double k2 = -(m + 0.5 * dt * k1) / tau + forcing_mid[i];
    const double k3 = -(m + 0.5 * dt * k2) / tau + forcing_mid[i];
    const double k4 = -(m + dt * k3) / tau + forcing[i + 1];
    out[i + 1] = m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

void fill_ou(const PopulationParams& pop, double v0, const TimeGrid& grid, SymmetricMatrix& c) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i] - grid.t0();
    double* row = c.row(i);
    for (std::size_t j = 0; j <= i; ++j) row[j] = ou_covariance(pop.tau, pop.f, v0, t, grid[j] - grid.t0());
  }
}

}  // namespace

double ou_covariance(double tau, double f, double v0, double t, double s) {
  if (s > t) throw std::invalid_argument("ou_covariance: requires s <= t");
  if (s < 0.0) throw std::invalid_argument("ou_covariance: requires s >= 0");
  return std::exp(-(t + s) / tau) * (v0 + 0.5 * tau * f * f * std::expm1(2.0 * s / tau));
}

Eigen::MatrixXd population_rates(const NetworkSpec& spec, const MomentState& state, const GhRule& rule,
                                 const ApplyOptions& opts) {
  check_compatible(spec, state);
  const std::size_t n = state.grid.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(n));
  for (std::size_t b = 0; b < spec.size(); ++b)
    for (std::size_t i = 0; i < n; ++i)
      out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) =
          rate(spec.populations[b].sigmoid, state.mu(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)),
               std::max(state.variance(b, i), 0.0), rule, opts);
  return out;
}

MomentState apply_F(const NetworkSpec& spec, const MomentState& state, const GhRule& rule, const ApplyOptions& opts) {
  check_compatible(spec, state);
  const std::size_t P = spec.size();
  const TimeGrid& grid = state.grid;
  const std::size_t n = grid.size();
  const double dt = grid.dt();
  const auto& jbar = spec.connectivity.j_bar;
  const auto& sigma = spec.connectivity.sigma;

  std::vector<Moments> moments;
  moments.reserve(P);
  for (std::size_t b = 0; b < P; ++b) moments.push_back(population_moments(state, b));

  // E[S_b(X_b)] on grid points and midpoints.
  std::vector<std::vector<double>> m(P), m_mid(P);
  for (std::size_t b = 0; b < P; ++b) {
    const auto& s = spec.populations[b].sigmoid;
    m[b].resize(n);
    m_mid[b].resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) m[b][i] = rate(s, moments[b].mu[i], moments[b].var[i], rule, opts);
    for (std::size_t i = 0; i + 1 < n; ++i) m_mid[b][i] = rate(s, moments[b].mu_mid[i], moments[b].var_mid[i], rule, opts);
  }

  MomentState out(grid, P);
  for (std::size_t a = 0; a < P; ++a) {
    const auto& pop = spec.populations[a];
    std::vector<double> forcing(n), forcing_mid(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = eval_input(pop.input, grid[i]);
      for (std::size_t b = 0; b < P; ++b) acc += jbar(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * m[b][i];
      forcing[i] = acc;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double acc = eval_input(pop.input, grid[i] + 0.5 * dt);
      for (std::size_t b = 0; b < P; ++b)
        acc += jbar(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * m_mid[b][i];
      forcing_mid[i] = acc;
    }
    std::vector<double> mu(n);
    integrate_mean(pop.tau, spec.initial_mean[a], forcing, forcing_mid, dt, mu.data());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(mu[i])) throw NumericalError("non-finite mean", a, i);
      out.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = mu[i];
    }
  }

  // E[S_b(X_b(t_i)) S_b(X_b(t_j))] for every population that some sigma_ab couples in.
  std::vector<SymmetricMatrix> delta(P);
  for (std::size_t b = 0; b < P; ++b) {
    bool needed = false;
    for (std::size_t a = 0; a < P; ++a)
      needed = needed || sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) != 0.0;
    if (!needed) continue;
    delta[b] = SymmetricMatrix(n);
    const auto& s = spec.populations[b].sigmoid;
    const auto& mb = moments[b];
    const auto& cb = state.cov[b];
    // Rows are independent; the work per row grows with i, so hand them out from the end.
    parallel_for(0, n, opts.threads, [&](std::size_t k) {
      const std::size_t i = n - 1 - k;
      const double* crow = cb.row(i);
      double* drow = delta[b].row(i);
      for (std::size_t j = 0; j <= i; ++j) {
        BivariateGaussianStats st{mb.mu[i], mb.mu[j], mb.var[i], mb.var[j], crow[j], false};
        drow[j] = pair_moment(s, st, rule, opts);
      }
    });
  }

  for (std::size_t a = 0; a < P; ++a) {
    const auto& pop = spec.populations[a];
    auto& c = out.cov[a];
    fill_ou(pop, spec.initial_variance[a], grid, c);

    SymmetricMatrix coupled;
    bool any = false;
    for (std::size_t b = 0; b < P; ++b) {
      const double s2 = std::pow(sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), 2);
      if (s2 == 0.0) continue;
      if (!any) {
        coupled = SymmetricMatrix(n);
        any = true;
      }
      auto& dst = coupled.packed();
      const auto& src = delta[b].packed();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += s2 * src[k];
    }
    if (any) {
      const auto h = detail::integrate_interaction(coupled, pop.tau, dt);
      auto& dst = c.packed();
      const auto& src = h.packed();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = c.row(i);
      for (std::size_t j = 0; j <= i; ++j)
        if (!std::isfinite(row[j])) throw NumericalError("non-finite covariance", a, i);
    }
  }
  return out;
}

MomentState initial_state(const NetworkSpec& spec, const TimeGrid& grid) {
  require_valid(spec);
  const std::size_t P = spec.size();
  const std::size_t n = grid.size();
  MomentState st(grid, P);
  for (std::size_t a = 0; a < P; ++a) {
    const auto& pop = spec.populations[a];
    std::vector<double> forcing(n), forcing_mid(n - 1), mu(n);
    for (std::size_t i = 0; i < n; ++i) forcing[i] = eval_input(pop.input, grid[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) forcing_mid[i] = eval_input(pop.input, grid[i] + 0.5 * grid.dt());
    integrate_mean(pop.tau, spec.initial_mean[a], forcing, forcing_mid, grid.dt(), mu.data());
    for (std::size_t i = 0; i < n; ++i) st.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = mu[i];
    fill_ou(pop, spec.initial_variance[a], grid, st.cov[a]);
  }
  return st;
}

std::pair<MomentState, SolveReport> solve_fixed_point(const NetworkSpec& spec, const TimeGrid& grid,
                                                      const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_fixed_point: tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("solve_fixed_point: max_iter must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const GhRule rule = gh_rule(opts.quadrature_order);

  SolveReport report;
  MomentState x = initial_state(spec, grid);
  for (int k = 0; k < opts.max_iter; ++k) {
    MomentState y = apply_F(spec, x, rule, opts.apply);
    double dmu = 0.0;
    double dc = 0.0;
    for (std::size_t a = 0; a < spec.size(); ++a) {
      dmu = std::max(dmu, (y.mu.row(static_cast<Eigen::Index>(a)) - x.mu.row(static_cast<Eigen::Index>(a)))
                              .cwiseAbs()
                              .maxCoeff());
      const auto& cy = y.cov[a].packed();
      const auto& cx = x.cov[a].packed();
      for (std::size_t q = 0; q < cy.size(); ++q) dc = std::max(dc, std::abs(cy[q] - cx[q]));
    }
    const double r = std::max(dmu, dc);
    report.mean_residuals.push_back(dmu);
    report.cov_residuals.push_back(dc);
    report.residual_history.push_back(r);
    report.iterations = k + 1;
    x = std::move(y);
    if (opts.on_iteration) opts.on_iteration(k + 1, r);
    if (r < opts.tol) {
      report.converged = true;
      break;
    }
  }

  const auto& h = report.residual_history;
  if (h.size() >= 2 && h[h.size() - 2] > 0.0) {
    const double ratio = h.back() / h[h.size() - 2];
    report.bound_estimate =
        ratio < 1.0 ? ratio / (1.0 - ratio) * h.back() : std::numeric_limits<double>::infinity();
  } else {
    report.bound_estimate = h.empty() ? std::numeric_limits<double>::infinity() : h.back();
  }
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(x), std::move(report)};
}

Eigen::MatrixXd wilson_cowan_solve(const NetworkSpec& spec, const TimeGrid& grid) {
  require_valid(spec);
  const std::size_t P = spec.size();
  const std::size_t n = grid.size();
  const double dt = grid.dt();
  const auto& jbar = spec.connectivity.j_bar;

  auto rhs = [&](double t, const Eigen::VectorXd& v) {
    Eigen::VectorXd rates(static_cast<Eigen::Index>(P));
    for (std::size_t b = 0; b < P; ++b)
      rates(static_cast<Eigen::Index>(b)) = eval_sigmoid(spec.populations[b].sigmoid, v(static_cast<Eigen::Index>(b)));
    Eigen::VectorXd out = jbar * rates;
    for (std::size_t a = 0; a < P; ++a) {
      const auto ai = static_cast<Eigen::Index>(a);
      out(ai) += -v(ai) / spec.populations[a].tau + eval_input(spec.populations[a].input, t);
    }
    return out;
  };

  Eigen::MatrixXd out(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(n));
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(spec.initial_mean.data(), static_cast<Eigen::Index>(P));
  out.col(0) = v;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t = grid[i];
    const Eigen::VectorXd k1 = rhs(t, v);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, v + dt * k3);
    v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.col(static_cast<Eigen::Index>(i + 1)) = v;
  }
  return out;
}

}  // namespace mfnet

#pragma once

// The mean-field map on (mean, covariance) pairs and its fixed-point solver.
//
// Given a Gaussian process X with mean mu^X and covariance C^X, one
// application returns Y with
//   d mu^Y/dt = -mu^Y / tau + sum_b Jbar_ab E[S_b(X_b(t))] + I_a(t)
//   C^Y_aa(t,s) = C^OU_aa(t,s) + sum_b sigma_ab^2 H_ab(t,s)
// where H is the exponentially weighted double integral of
// E[S_b(X_b(u)) S_b(X_b(v))], built by first-order recursions on the grid.
// Cross-population covariances are identically zero and are not stored.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfnet/model.hpp"
#include "mfnet/quadrature.hpp"
#include "mfnet/symmetric_matrix.hpp"

namespace mfnet {

struct MomentState {
  explicit MomentState(TimeGrid g, std::size_t populations)
      : grid(g), mu(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(populations), static_cast<Eigen::Index>(g.size()))),
        cov(populations, SymmetricMatrix(g.size())) {}

  TimeGrid grid;
  Eigen::MatrixXd mu;               ///< P x n, mu(a, i) = mu_a(t_i)
  std::vector<SymmetricMatrix> cov;  ///< cov[a](i, j) = C_aa(t_i, t_j)

  std::size_t populations() const noexcept { return cov.size(); }
  double variance(std::size_t a, std::size_t i) const noexcept { return cov[a](i, i); }
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  ///< max of mean and covariance sup-norm changes
  std::vector<double> mean_residuals;
  std::vector<double> cov_residuals;
  bool converged = false;
  /// Geometric-tail estimate of the remaining distance to the fixed point,
  /// r / (1 - r) * last residual with r the last residual ratio; +inf when the
  /// residuals are not contracting.
  double bound_estimate = 0.0;
  double wall_time_s = 0.0;
};

/// Non-finite value produced during an update.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t population, std::size_t grid_index)
      : std::runtime_error(what + " (population " + std::to_string(population) + ", grid index " +
                           std::to_string(grid_index) + ")"),
        population_(population),
        grid_index_(grid_index) {}
  std::size_t population() const noexcept { return population_; }
  std::size_t grid_index() const noexcept { return grid_index_; }

 private:
  std::size_t population_;
  std::size_t grid_index_;
};

struct ApplyOptions {
  /// Use the one-dimensional ErfForm reductions instead of generic quadrature.
  bool use_erf_closed_form = true;
  unsigned threads = 1;  ///< 0 = all hardware threads
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 200;
  int quadrature_order = kDefaultGhOrder;
  ApplyOptions apply;
  /// Called after every iteration with (iteration, residual).
  std::function<void(int, double)> on_iteration;
};

/// Covariance of the noise-driven part, e^{-(t+s)/tau} [v0 + tau f^2/2 (e^{2s/tau} - 1)],
/// times measured from the initial instant. Requires 0 <= s <= t.
double ou_covariance(double tau, double f, double v0, double t, double s);

/// E[S_b(X_b(t_i))] at every grid point; exposed for diagnostics and the
/// Monte Carlo comparison.
Eigen::MatrixXd population_rates(const NetworkSpec& spec, const MomentState& state, const GhRule& rule,
                                 const ApplyOptions& opts = {});

/// One application of the map. Throws std::invalid_argument on a
/// population-count mismatch and NumericalError on non-finite output.
MomentState apply_F(const NetworkSpec& spec, const MomentState& state, const GhRule& rule,
                    const ApplyOptions& opts = {});

/// Zero-interaction process: input convolution for the mean, OU covariance.
MomentState initial_state(const NetworkSpec& spec, const TimeGrid& grid);

/// Iterates X_{k+1} = F(X_k) from initial_state until the sup-norm change
/// drops below tol or max_iter is reached. Non-convergence is reported, not thrown.
std::pair<MomentState, SolveReport> solve_fixed_point(const NetworkSpec& spec, const TimeGrid& grid,
                                                      const SolverOptions& opts = {});

/// RK4 solution of the deterministic rate equations
///   dV_a/dt = -V_a / tau_a + sum_b Jbar_ab S_b(V_b) + I_a(t)
/// started from initial_mean; sigma and f are ignored. Returns P x n.
Eigen::MatrixXd wilson_cowan_solve(const NetworkSpec& spec, const TimeGrid& grid);

namespace detail {

/// H from the first-order recursions, lower triangle only.
SymmetricMatrix integrate_interaction(const SymmetricMatrix& delta, double tau, double dt);

/// The same recursions run independently for both orderings (t > s and t < s)
/// on a dense matrix, for checking that the two halves agree.
Eigen::MatrixXd integrate_interaction_dense(const SymmetricMatrix& delta, double tau, double dt);

/// Midpoint value between samples i and i+1 by 4-point Lagrange interpolation
/// (linear when fewer than four samples exist).
double midpoint_value(const double* samples, std::size_t n, std::size_t i) noexcept;

}  // namespace detail

}  // namespace mfnet

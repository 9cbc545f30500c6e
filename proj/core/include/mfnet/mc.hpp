#pragma once

// Finite-size network simulation: frozen Gaussian weights, Euler-Maruyama on
// the raw SDE, and moment estimates pooled over neurons and trials.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfnet/meanfield.hpp"
#include "mfnet/model.hpp"

namespace mfnet {

// ---------------------------------------------------------------------------
// Counter-based random numbers

/// Philox4x32-10 block cipher: every output depends only on (key, counter),
/// so streams for any (trial, neuron, step) can be drawn in any order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Two independent standard normals (Box-Muller on one Philox block).
std::array<double, 2> normal_pair(std::uint64_t seed, std::array<std::uint32_t, 4> counter) noexcept;

enum class StreamTag : std::uint32_t { kWeights = 1, kInitial = 2, kNoise = 3 };

// ---------------------------------------------------------------------------

struct McConfig {
  std::vector<std::size_t> sizes;  ///< N_beta per population
  int trials = 100;
  std::uint64_t seed = 1;
  double dt_sde = 0.0;  ///< 0: grid dt / 5
  bool resample_weights_per_trial = true;
  unsigned threads = 1;  ///< 0 = all hardware threads
  /// Grid indices at which interaction statistics, lagged covariances and
  /// V-U correlations are estimated. Empty: ten evenly spaced indices ending
  /// at the last grid point.
  std::vector<std::size_t> checkpoints;
};

/// Throws std::invalid_argument naming the offending field.
void validate_mc_config(const McConfig& mc, const NetworkSpec& spec);

std::vector<std::size_t> default_checkpoints(std::size_t grid_size, std::size_t count = 10);

/// Population index of every neuron, neurons ordered by population.
std::vector<std::size_t> neuron_populations(const std::vector<std::size_t>& sizes);

/// J_ij ~ N(Jbar_ab / N_b, sigma_ab^2 / N_b), a = pop(i), b = pop(j), drawn
/// from the stream of (seed, trial).
Eigen::MatrixXd sample_weights(const ConnectivityStats& stats, const std::vector<std::size_t>& sizes,
                               std::uint64_t seed, std::uint32_t trial);

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::uint32_t trial, std::size_t step)
      : std::runtime_error("network simulation diverged (trial " + std::to_string(trial) + ", step " +
                           std::to_string(step) + ")"),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Euler-Maruyama sub-steps per grid step for the configured dt_sde.
std::size_t substeps(const McConfig& mc, const TimeGrid& grid);

/// Voltages of every neuron sampled on `grid` (N x n), integrated at dt_sde.
Eigen::MatrixXd simulate_network(const NetworkSpec& spec, const Eigen::MatrixXd& weights, const McConfig& mc,
                                 const TimeGrid& grid, std::uint32_t trial);

struct McEnsemble {
  TimeGrid grid{0.0, 1.0, 1.0};
  std::vector<Eigen::MatrixXd> trajectories;  ///< one N x n matrix per trial
  std::vector<Eigen::MatrixXd> weights;       ///< per trial (a single entry when frozen)
  McConfig config;
};

/// Stores every trajectory; meant for small networks. Large runs should use
/// run_monte_carlo, which keeps only per-trial summaries.
McEnsemble simulate_ensemble(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc);

/// Population averages of one trial, the unit of the across-trial estimators.
struct TrialSummary {
  Eigen::MatrixXd m1;  ///< P x n, mean of V over the population
  Eigen::MatrixXd c2;  ///< P x n, mean of (V - m1)^2
  // indexed [a][c] at checkpoint c
  std::vector<std::vector<double>> lag;  ///< mean V(t_c) V(t_end)
  // indexed [a * P + b][c]
  std::vector<std::vector<double>> u1;      ///< mean of U_ab over neurons of a
  std::vector<std::vector<double>> u2;      ///< mean of U_ab^2
  std::vector<std::vector<double>> vu_all;  ///< sum_i V_i * sum_k U_k / N_a^2
  std::vector<std::vector<double>> vu_diag;  ///< mean of V_i U_i
};

TrialSummary summarize_trial(const NetworkSpec& spec, const McConfig& mc, const Eigen::MatrixXd& weights,
                             const Eigen::MatrixXd& traj);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct EmpiricalMoments {
  TimeGrid grid{0.0, 1.0, 1.0};
  int trials = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> checkpoints;
  std::vector<std::vector<Estimate>> mean;      ///< [a][i] on the full grid
  std::vector<std::vector<Estimate>> variance;  ///< [a][i]
  std::vector<std::vector<Estimate>> lag_cov;   ///< [a][c], Cov(V(t_c), V(t_end))
  std::vector<std::vector<Estimate>> u_mean;    ///< [a * P + b][c]
  std::vector<std::vector<Estimate>> u_var;     ///< [a * P + b][c]
  /// Correlation of V_i(t_c) with U_kb(t_c) for distinct neurons i, k of the
  /// same population a, averaged over all such pairs: [a * P + b][c].
  std::vector<std::vector<double>> corr_vu;
  /// Mean over checkpoints and population pairs of |corr_vu|.
  double corr_vu_summary = 0.0;
};

EmpiricalMoments empirical_moments(const NetworkSpec& spec, const McEnsemble& ensemble);

/// Reduction in trial order; the result does not depend on scheduling.
EmpiricalMoments moments_from_summaries(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc,
                                        const std::vector<TrialSummary>& trials);

/// Simulates and summarizes every trial (in parallel across trials) without
/// keeping trajectories.
EmpiricalMoments run_monte_carlo(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc);

struct McComparison {
  std::vector<std::size_t> checkpoints;
  std::vector<std::vector<double>> z_mean;  ///< [a][c]
  std::vector<std::vector<double>> z_var;
  std::vector<std::vector<double>> z_u_mean;  ///< [a * P + b][c]
  std::vector<std::vector<double>> z_u_var;
  double max_z_mean = 0.0;
  double max_z_var = 0.0;
  double max_z_u_mean = 0.0;
  double max_z_u_var = 0.0;
  double max_z = 0.0;
};

/// |MC - MF| / SE at the checkpoints. The interaction statistics are compared
/// with Jbar_ab E[S_b] and sigma_ab^2 E[S_b^2]. Zero SE gives z = 0 on exact
/// agreement and +inf otherwise. Throws std::invalid_argument on a grid mismatch.
McComparison compare_mc_mf(const NetworkSpec& spec, const EmpiricalMoments& moments, const MomentState& state,
                           int quadrature_order = kDefaultGhOrder);

}  // namespace mfnet

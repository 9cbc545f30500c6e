#pragma once

// Linearization of the two-population rate model at the origin, oscillation
// detection on time series, and parameter sweeps over the mean-field solver.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfnet/meanfield.hpp"
#include "mfnet/model.hpp"
#include "mfnet/quadrature.hpp"

namespace mfnet {

struct JacobianEigs {
  std::array<std::complex<double>, 2> lambda;  ///< eigenvalues of Jbar, "+" root first
  std::array<std::complex<double>, 2> system;  ///< -1/tau + g lambda
};

/// Throws std::invalid_argument unless j_bar is 2x2.
JacobianEigs jacobian_eigs(const Eigen::MatrixXd& j_bar, double tau, double g);

/// J12 J21 < -(J11 - J22)^2 / 4, i.e. Jbar has a complex pair.
bool is_feedback_loop(const Eigen::MatrixXd& j_bar);

struct HopfThreshold {
  std::optional<double> g_c;
  std::string reason;  ///< why g_c is absent
};

/// 2 / (tau (J11 + J22)) when Jbar has a complex pair with positive trace.
HopfThreshold hopf_threshold(const Eigen::MatrixXd& j_bar, double tau);

/// 1 - E[tanh^2(sqrt(v) X)]. Uses `rule` while sqrt(v) <= 1.5 and a composite
/// Simpson rule on the sharper integrands beyond.
double h_factor(double v, const GhRule& rule);

struct HopfAnalysis {
  JacobianEigs eigs;
  HopfThreshold threshold;
  bool feedback_loop = false;
  std::optional<double> h_of_v;
};

HopfAnalysis analyze_hopf(const Eigen::MatrixXd& j_bar, double tau, double g, std::optional<double> v = std::nullopt,
                          int quadrature_order = kDefaultGhOrder);

struct Oscillation {
  double amplitude = 0.0;
  double period = 0.0;
};

inline constexpr double kOscillationThreshold = 1e-4;

/// Looks at samples after burn_in: amplitude (max - min) / 2, period the mean
/// spacing of successive maxima refined by a parabola through each. Returns
/// nullopt when the amplitude is below `threshold`, when fewer than two maxima
/// exist, or when the second half of the window has less than half the
/// amplitude of the first (a decaying transient). Throws
/// std::invalid_argument when fewer than 8 samples follow the burn-in.
std::optional<Oscillation> detect_oscillation(const std::vector<double>& series, double dt, double burn_in,
                                              double threshold = kOscillationThreshold);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { kG, kSigmaScale, kFScale, kJScale };

std::string to_string(SweepParameter p);
/// Throws std::invalid_argument for an unknown name.
SweepParameter sweep_parameter_from_string(const std::string& name);

/// Template with the parameter applied: slope g, or sigma / f / Jbar scaled.
NetworkSpec apply_parameter(const NetworkSpec& tmpl, SweepParameter p, double value);

struct SweepOptions {
  double t_end = 40.0;
  double dt = 0.2;
  double t1 = 30.0;  ///< averaging window [t1, t2] for the asymptotic mean
  double t2 = 40.0;
  bool both_branches = true;  ///< solve from initial_mean +- branch_delta
  double branch_delta = 0.1;
  double split_threshold = 1e-3;
  double oscillation_burn_in = -1.0;  ///< < 0: 20 max tau
  SolverOptions solver;
  unsigned threads = 1;  ///< sweep points in parallel
};

struct SweepPoint {
  double value = 0.0;
  std::vector<double> mean_plus;   ///< per population, averaged over [t1, t2]
  std::vector<double> mean_minus;  ///< empty when only one branch is solved
  std::vector<double> c0;          ///< variance averaged over [t1, t2]
  double amplitude = 0.0;          ///< oscillation of mu_1, 0 when none
  double period = 0.0;
  std::string regime;  ///< "single", "split", "oscillating" or "failed"
  bool converged = false;
  int iterations = 0;
  std::string error;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::kG;
  std::vector<double> values;
  std::vector<SweepPoint> points;
};

/// Solves every grid value; failures are recorded on the point and the sweep
/// continues. Throws std::invalid_argument for an empty or non-increasing grid.
SweepResult sweep(const NetworkSpec& tmpl, SweepParameter parameter, const std::vector<double>& values,
                  const SweepOptions& opts = {});

/// First grid value whose branches separate, if any.
std::optional<double> branch_split_value(const SweepResult& r);

/// Period of the dominant spectral peak of a series after burn-in (mean
/// removed, Hann window, zero-padded DFT with parabolic peak refinement).
double dominant_period(const std::vector<double>& series, double dt, double burn_in);

}  // namespace mfnet

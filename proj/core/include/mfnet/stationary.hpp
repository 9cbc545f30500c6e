#pragma once

// Stationary statistics of long-horizon solves: the covariance as a function
// of the lag alone, and the trivial / chaotic classification built on it.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfnet/meanfield.hpp"
#include "mfnet/model.hpp"

namespace mfnet {

struct StationaryProfile {
  double dt = 0.0;
  std::vector<double> lags;                  ///< tau_k = k dt
  std::vector<std::vector<double>> c_of_tau;  ///< c_of_tau[a][k] = C_a(tau_k)
  std::vector<double> c0;                    ///< C_a(0)
  std::vector<double> mean;                  ///< time-averaged mu_a after burn-in
  /// max over lags and populations of the spread of C(t, t - tau) across t
  double stationarity_defect = 0.0;

  std::size_t populations() const noexcept { return c0.size(); }
};

struct PreconditionCheck {
  bool ok = true;
  std::vector<std::string> reasons;
};

PreconditionCheck check_stationary_preconditions(const NetworkSpec& spec);

/// Averages C(t, t - tau) over every t past the burn-in, and over t >= tau
/// for lags longer than the burn-in. Lags run up to t_end - t0 - burn_in.
/// Throws std::invalid_argument unless burn_in < t_end - t0.
StationaryProfile extract_profile(const MomentState& state, double burn_in);

enum class Regime { kTrivial, kChaotic };

std::string to_string(Regime r);

inline constexpr double kDefaultChaosThreshold = 1e-3;

/// Chaotic iff some population has C(0) > threshold.
Regime classify_regime(const StationaryProfile& profile, double threshold = kDefaultChaosThreshold);

/// Horizon and solver settings for a stationary run. The grid spans
/// [0, horizon_factor * max tau] and the burn-in is burn_in_factor * max tau.
struct StationaryOptions {
  double horizon_factor = 40.0;
  double burn_in_factor = 20.0;
  double dt = 0.0;  ///< 0: max tau / 100, widened to at most max_points samples
  std::size_t max_points = 401;
  double threshold = kDefaultChaosThreshold;
  SolverOptions solver;
};

struct StationaryResult {
  StationaryProfile profile;
  Regime regime = Regime::kTrivial;
  SolveReport report;
};

TimeGrid stationary_grid(const NetworkSpec& spec, const StationaryOptions& opts);

/// Solve, extract and classify. Throws std::invalid_argument when the
/// preconditions fail.
StationaryResult run_stationary(const NetworkSpec& spec, const StationaryOptions& opts = {});

class UnbracketedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GcSearch {
  double g_c = 0.0;
  std::vector<double> g_evaluated;
  std::vector<Regime> regimes;
  std::vector<double> c0;  ///< max_a C_a(0) for each evaluation
};

/// Bisection on the sigmoid slope of every population until the bracket is
/// narrower than tol_g; g_c is the final midpoint. Throws UnbracketedError
/// unless g_low is trivial and g_high chaotic.
GcSearch find_gc(const NetworkSpec& tmpl, double g_low, double g_high, double tol_g,
                 const StationaryOptions& opts = {});

/// Template with every population's slope set to g.
NetworkSpec spec_with_slope(const NetworkSpec& tmpl, double g);

}  // namespace mfnet

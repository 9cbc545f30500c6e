#pragma once

// Network parameterization shared by every other module: sigmoid catalog,
// deterministic input signals, connectivity statistics and the time grid.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace mfnet {

// ---------------------------------------------------------------------------
// Sigmoids

/// S(V) = s_max / (1 + exp(-(V - v_t) / v_s))
struct Logistic {
  double s_max = 1.0;
  double v_t = 0.0;
  double v_s = 1.0;
};

/// S(x) = Phi(g x + gamma), Phi the standard Gaussian CDF.
struct ErfForm {
  double g = 1.0;
  double gamma = 0.0;
};

/// S(x) = tanh(g x)
struct Tanh {
  double g = 1.0;
};

/// Class-I squashing S(p) = c * sqrt((p - p_star)^+).
/// Not Lipschitz at p_star, so uniqueness of the mean-field solution is not
/// guaranteed when it is used inside the solver.
struct SqrtClassI {
  double c = 1.0;
  double p_star = 0.0;
};

using Sigmoid = std::variant<Logistic, ErfForm, Tanh, SqrtClassI>;

double eval_sigmoid(const Sigmoid& s, double x) noexcept;

/// sup |S| over the real line, or nullopt for unbounded variants.
std::optional<double> sigmoid_bound(const Sigmoid& s) noexcept;

/// True when S(-x) = -S(x).
bool sigmoid_is_odd(const Sigmoid& s) noexcept;

std::string sigmoid_kind(const Sigmoid& s);

/// Copy of `s` with its slope set to g: Tanh and ErfForm take g directly,
/// Logistic gets v_s = 1 / g. SqrtClassI has no slope and is returned as is.
Sigmoid with_slope(const Sigmoid& s, double g);

/// Standard Gaussian CDF.
double normal_cdf(double x) noexcept;

/// tanh through a single exp away from the origin; within a few ulp of std::tanh.
inline double fast_tanh(double y) noexcept {
  const double ay = y < 0.0 ? -y : y;
  if (ay < 0.125) return std::tanh(y);
  const double e = std::exp(-2.0 * ay);
  return std::copysign((1.0 - e) / (1.0 + e), y);
}

// ---------------------------------------------------------------------------
// Inputs

struct ConstantInput {
  double value = 0.0;
};

/// values[0] holds before breakpoints[0], values[k] on [breakpoints[k-1], breakpoints[k]).
struct PiecewiseConstantInput {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

struct SinusoidInput {
  double mean = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
};

using InputSignal = std::variant<ConstantInput, PiecewiseConstantInput, SinusoidInput>;

double eval_input(const InputSignal& sig, double t) noexcept;

bool input_is_constant(const InputSignal& sig) noexcept;

// ---------------------------------------------------------------------------
// Network

struct PopulationParams {
  double tau = 1.0;
  double f = 0.0;  ///< white-noise amplitude
  Sigmoid sigmoid = Tanh{1.0};
  InputSignal input = ConstantInput{0.0};
};

struct ConnectivityStats {
  Eigen::MatrixXd j_bar;  ///< mean coupling, entry (alpha, beta)
  Eigen::MatrixXd sigma;  ///< coupling dispersion
};

struct NetworkSpec {
  std::vector<PopulationParams> populations;
  ConnectivityStats connectivity;
  std::vector<double> initial_mean;
  std::vector<double> initial_variance;

  std::size_t size() const noexcept { return populations.size(); }
};

enum class IssueKind {
  kDimensionMismatch,
  kNonPositiveTimeConstant,
  kNegativeNoise,
  kNegativeVariance,
  kNegativeDispersion,
  kInvalidSigmoid,
  kInvalidInput,
  kNonFinite,
  kEmpty,
};

std::string to_string(IssueKind kind);

struct SpecIssue {
  IssueKind kind;
  std::string path;  ///< e.g. "populations[1].tau"
  std::string message;
};

struct ValidationResult {
  std::optional<NetworkSpec> spec;  ///< set iff issues is empty
  std::vector<SpecIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
};

/// Collects every invariant violation; valid specs are returned unchanged.
ValidationResult validate_spec(const NetworkSpec& spec);

class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(std::vector<SpecIssue> issues);
  const std::vector<SpecIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<SpecIssue> issues_;
};

/// Throws SpecError listing all issues when the spec is invalid.
const NetworkSpec& require_valid(const NetworkSpec& spec);

// ---------------------------------------------------------------------------
// Time grid

class TimeGrid {
 public:
  /// n = floor((t_end - t0) / dt) + 1; throws std::invalid_argument unless n >= 2.
  TimeGrid(double t0, double t_end, double dt);

  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return n_; }
  double operator[](std::size_t i) const noexcept { return t0_ + dt_ * static_cast<double>(i); }
  double last() const noexcept { return (*this)[n_ - 1]; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
    return a.t0_ == b.t0_ && a.dt_ == b.dt_ && a.n_ == b.n_;
  }

 private:
  double t0_;
  double t_end_;
  double dt_;
  std::size_t n_;
};

/// Default step for a spec: min tau / 100, widened so that n <= max_points.
double default_dt(const NetworkSpec& spec, double t0, double t_end, std::size_t max_points = 4096);

}  // namespace mfnet

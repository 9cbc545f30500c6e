#include "mfnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mfnet/parallel.hpp"

namespace mfnet {

namespace {

void require_2x2(const Eigen::MatrixXd& j) {
  if (j.rows() != 2 || j.cols() != 2) throw std::invalid_argument("two-population analysis needs a 2x2 Jbar");
}

double discriminant(const Eigen::MatrixXd& j) {
  const double d = j(0, 0) - j(1, 1);
  return d * d + 4.0 * j(0, 1) * j(1, 0);
}

}  // namespace

JacobianEigs jacobian_eigs(const Eigen::MatrixXd& j_bar, double tau, double g) {
  require_2x2(j_bar);
  const double tr = j_bar(0, 0) + j_bar(1, 1);
  const std::complex<double> root = std::sqrt(std::complex<double>(discriminant(j_bar), 0.0));
  JacobianEigs e;
  e.lambda = {0.5 * (tr + root), 0.5 * (tr - root)};
  for (int k = 0; k < 2; ++k) e.system[k] = -1.0 / tau + g * e.lambda[k];
  return e;
}

bool is_feedback_loop(const Eigen::MatrixXd& j_bar) {
  require_2x2(j_bar);
  return discriminant(j_bar) < 0.0;
}

HopfThreshold hopf_threshold(const Eigen::MatrixXd& j_bar, double tau) {
  require_2x2(j_bar);
  if (!is_feedback_loop(j_bar)) return {std::nullopt, "no complex eigenvalue pair"};
  const double tr = j_bar(0, 0) + j_bar(1, 1);
  if (!(tr > 0.0)) return {std::nullopt, "non-positive trace"};
  return {2.0 / (tau * tr), {}};
}

double h_factor(double v, const GhRule& rule) {
  if (!(v >= 0.0)) throw std::invalid_argument("h_factor: variance must be >= 0");
  const double a = std::sqrt(v);
  if (a <= 1.5) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = std::tanh(a * rule.nodes[i]);
      acc += rule.weights[i] * t * t;
    }
    return 1.0 - acc;
  }
  // sech^2(a x) phi(x) is even: Simpson on [0, 9] with steps resolving 1/a
  const int m = 2 * static_cast<int>(std::ceil(9.0 * a * 20.0));
  const double h = 9.0 / m;
  auto f = [a](double x) {
    const double c = std::cosh(a * x);
    return std::exp(-0.5 * x * x) / (c * c);
  };
  double s = f(0.0) + f(9.0);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return 2.0 * s * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

HopfAnalysis analyze_hopf(const Eigen::MatrixXd& j_bar, double tau, double g, std::optional<double> v,
                          int quadrature_order) {
  HopfAnalysis h;
  h.eigs = jacobian_eigs(j_bar, tau, g);
  h.threshold = hopf_threshold(j_bar, tau);
  h.feedback_loop = is_feedback_loop(j_bar);
  if (v) h.h_of_v = h_factor(*v, gh_rule(quadrature_order));
  return h;
}

namespace {

double half_range(const double* x, std::size_t n) {
  const auto [lo, hi] = std::minmax_element(x, x + n);
  return 0.5 * (*hi - *lo);
}

}  // namespace

std::optional<Oscillation> detect_oscillation(const std::vector<double>& series, double dt, double burn_in,
                                              double threshold) {
  if (!(dt > 0.0)) throw std::invalid_argument("detect_oscillation: dt must be > 0");
  const auto start = static_cast<std::size_t>(std::max(0.0, std::ceil(burn_in / dt - 1e-9)));
  if (start >= series.size() || series.size() - start < 8) {
    throw std::invalid_argument("detect_oscillation: series too short for the burn-in");
  }
  const double* x = series.data() + start;
  const std::size_t n = series.size() - start;

  Oscillation o;
  o.amplitude = half_range(x, n);
  if (!(o.amplitude >= threshold)) return std::nullopt;
  if (half_range(x + n / 2, n - n / 2) < 0.5 * half_range(x, n / 2)) return std::nullopt;

  const double mid = 0.5 * (*std::min_element(x, x + n) + *std::max_element(x, x + n));
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (x[i] > x[i - 1] && x[i] >= x[i + 1] && x[i] > mid) {
      const double den = x[i - 1] - 2.0 * x[i] + x[i + 1];
      const double shift = den != 0.0 ? 0.5 * (x[i - 1] - x[i + 1]) / den : 0.0;
      const double t = (static_cast<double>(i) + shift) * dt;
      // a flat top can register twice; keep one peak per crossing of the midline
      bool crossed = peaks.empty();
      if (!crossed) {
        const auto prev = static_cast<std::size_t>(std::llround(peaks.back() / dt));
        for (std::size_t k = prev; k < i && !crossed; ++k) crossed = x[k] < mid;
      }
      if (crossed) peaks.push_back(t);
    }
  }
  if (peaks.size() < 2) return std::nullopt;
  o.period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  return o;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kG: return "g";
    case SweepParameter::kSigmaScale: return "sigma_scale";
    case SweepParameter::kFScale: return "f_scale";
    case SweepParameter::kJScale: return "j_scale";
  }
  return "unknown";
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  for (auto p : {SweepParameter::kG, SweepParameter::kSigmaScale, SweepParameter::kFScale, SweepParameter::kJScale}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected g, sigma_scale, f_scale or j_scale)");
}

NetworkSpec apply_parameter(const NetworkSpec& tmpl, SweepParameter p, double value) {
  NetworkSpec s = tmpl;
  switch (p) {
    case SweepParameter::kG:
      for (auto& pop : s.populations) pop.sigmoid = with_slope(pop.sigmoid, value);
      break;
    case SweepParameter::kSigmaScale: s.connectivity.sigma *= value; break;
    case SweepParameter::kFScale:
      for (auto& pop : s.populations) pop.f *= value;
      break;
    case SweepParameter::kJScale: s.connectivity.j_bar *= value; break;
  }
  return s;
}

namespace {

SweepPoint solve_point(const NetworkSpec& tmpl, SweepParameter parameter, double value, const SweepOptions& opts) {
  SweepPoint pt;
  pt.value = value;
  try {
    NetworkSpec spec = apply_parameter(tmpl, parameter, value);
    const TimeGrid grid(0.0, opts.t_end, opts.dt);
    const auto i1 = static_cast<std::size_t>(std::ceil((opts.t1 - grid.t0()) / grid.dt() - 1e-9));
    const auto i2 = std::min(grid.size() - 1, static_cast<std::size_t>(std::floor((opts.t2 - grid.t0()) / grid.dt() + 1e-9)));
    if (i1 > i2) throw std::invalid_argument("sweep: empty averaging window [t1, t2]");
    const std::size_t P = spec.size();

    auto window_mean = [&](const MomentState& st, std::size_t a, bool variance) {
      double s = 0.0;
      for (std::size_t i = i1; i <= i2; ++i) {
        s += variance ? st.variance(a, i) : st.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i));
      }
      return s / static_cast<double>(i2 - i1 + 1);
    };

    auto run = [&](double shift) {
      NetworkSpec s = spec;
      for (auto& m : s.initial_mean) m += shift;
      return solve_fixed_point(s, grid, opts.solver);
    };

    const auto [plus, rep_plus] = run(opts.both_branches ? opts.branch_delta : 0.0);
    pt.converged = rep_plus.converged;
    pt.iterations = rep_plus.iterations;
    for (std::size_t a = 0; a < P; ++a) {
      pt.mean_plus.push_back(window_mean(plus, a, false));
      pt.c0.push_back(window_mean(plus, a, true));
    }
    bool split = false;
    if (opts.both_branches) {
      const auto [minus, rep_minus] = run(-opts.branch_delta);
      pt.converged = pt.converged && rep_minus.converged;
      pt.iterations += rep_minus.iterations;
      for (std::size_t a = 0; a < P; ++a) {
        pt.mean_minus.push_back(window_mean(minus, a, false));
        split = split || std::abs(pt.mean_plus[a] - pt.mean_minus[a]) > opts.split_threshold;
      }
    }

    double tau_max = 0.0;
    for (const auto& p : spec.populations) tau_max = std::max(tau_max, p.tau);
    const double burn = opts.oscillation_burn_in >= 0.0 ? opts.oscillation_burn_in : 20.0 * tau_max;
    std::vector<double> mu0(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) mu0[i] = plus.mu(0, static_cast<Eigen::Index>(i));
    std::optional<Oscillation> osc;
    if (burn < grid.last() - grid.t0()) {
      try {
        osc = detect_oscillation(mu0, grid.dt(), burn);
      } catch (const std::invalid_argument&) {
        osc.reset();  // window too short to judge
      }
    }
    if (osc) {
      pt.amplitude = osc->amplitude;
      pt.period = osc->period;
    }
    pt.regime = osc ? "oscillating" : (split ? "split" : "single");
  } catch (const std::exception& e) {
    pt.regime = "failed";
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

SweepResult sweep(const NetworkSpec& tmpl, SweepParameter parameter, const std::vector<double>& values,
                  const SweepOptions& opts) {
  if (values.empty()) throw std::invalid_argument("sweep: empty parameter grid");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) throw std::invalid_argument("sweep: parameter grid must be strictly increasing");
  }
  require_valid(tmpl);
  SweepResult r;
  r.parameter = parameter;
  r.values = values;
  r.points.resize(values.size());
  parallel_for(0, values.size(), opts.threads,
               [&](std::size_t k) { r.points[k] = solve_point(tmpl, parameter, values[k], opts); });
  return r;
}

std::optional<double> branch_split_value(const SweepResult& r) {
  for (const auto& p : r.points) {
    if (p.regime == "split") return p.value;
  }
  return std::nullopt;
}

double dominant_period(const std::vector<double>& series, double dt, double burn_in) {
  const auto start = static_cast<std::size_t>(std::max(0.0, std::ceil(burn_in / dt - 1e-9)));
  if (start + 8 > series.size()) throw std::invalid_argument("dominant_period: series too short");
  const std::size_t n = series.size() - start;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += series[start + i];
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    x[i] = w * (series[start + i] - mean);
  }
  // plain DFT on an 8x zero-padded frequency grid; series here are short
  const std::size_t m = 8 * n;
  auto power = [&](std::size_t k) {
    double re = 0.0;
    double im = 0.0;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) {
      re += x[i] * std::cos(w * static_cast<double>(i));
      im -= x[i] * std::sin(w * static_cast<double>(i));
    }
    return re * re + im * im;
  };
  std::vector<double> p(m / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = power(k);
  std::size_t best = 1;
  for (std::size_t k = 2; k + 1 < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  double shift = 0.0;
  if (best + 1 < p.size()) {
    const double den = p[best - 1] - 2.0 * p[best] + p[best + 1];
    if (den != 0.0) shift = 0.5 * (p[best - 1] - p[best + 1]) / den;
  }
  const double freq = (static_cast<double>(best) + shift) / (static_cast<double>(m) * dt);
  return freq > 0.0 ? 1.0 / freq : std::numeric_limits<double>::infinity();
}

}  // namespace mfnet

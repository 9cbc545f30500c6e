#include "mfnet/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfnet {

PreconditionCheck check_stationary_preconditions(const NetworkSpec& spec) {
  PreconditionCheck out;
  auto fail = [&out](std::string r) {
    out.ok = false;
    out.reasons.push_back(std::move(r));
  };
  const auto v = validate_spec(spec);
  if (!v.ok()) {
    for (const auto& i : v.issues) fail(i.path + ": " + i.message);
    return out;
  }
  for (std::size_t a = 0; a < spec.size(); ++a) {
    const auto& pop = spec.populations[a];
    if (!input_is_constant(pop.input)) fail("non-constant input (populations[" + std::to_string(a) + "])");
  }
  return out;
}

StationaryProfile extract_profile(const MomentState& state, double burn_in) {
  const auto& grid = state.grid;
  const double span = grid.last() - grid.t0();
  if (!(burn_in >= 0.0) || !(burn_in < span)) {
    throw std::invalid_argument("extract_profile: burn_in must lie in [0, t_end - t0)");
  }
  const std::size_t n = grid.size();
  const auto ib = static_cast<std::size_t>(std::ceil(burn_in / grid.dt() - 1e-9));
  const std::size_t m = n - ib;  // samples after burn-in; lags 0..m-1

  StationaryProfile p;
  p.dt = grid.dt();
  p.lags.resize(m);
  for (std::size_t k = 0; k < m; ++k) p.lags[k] = p.dt * static_cast<double>(k);

  const std::size_t P = state.populations();
  p.c_of_tau.assign(P, std::vector<double>(m, 0.0));
  p.c0.resize(P);
  p.mean.resize(P);
  for (std::size_t a = 0; a < P; ++a) {
    const auto& c = state.cov[a];
    for (std::size_t k = 0; k < m; ++k) {
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      // the later time runs over the same window for every lag as long as
      // k <= ib, so a slow drift shifts all lags alike
      const std::size_t first = std::max(ib, k);
      for (std::size_t i = first; i < n; ++i) {
        const double x = c(i, i - k);
        sum += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      p.c_of_tau[a][k] = sum / static_cast<double>(n - first);
      p.stationarity_defect = std::max(p.stationarity_defect, hi - lo);
    }
    p.c0[a] = p.c_of_tau[a][0];
    double s = 0.0;
    for (std::size_t i = ib; i < n; ++i) s += state.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i));
    p.mean[a] = s / static_cast<double>(m);
  }
  return p;
}

std::string to_string(Regime r) { return r == Regime::kChaotic ? "chaotic" : "trivial"; }

Regime classify_regime(const StationaryProfile& profile, double threshold) {
  for (double c : profile.c0) {
    if (c > threshold) return Regime::kChaotic;
  }
  return Regime::kTrivial;
}

namespace {
double max_tau(const NetworkSpec& spec) {
  double t = 0.0;
  for (const auto& p : spec.populations) t = std::max(t, p.tau);
  return t;
}
}  // namespace

TimeGrid stationary_grid(const NetworkSpec& spec, const StationaryOptions& opts) {
  require_valid(spec);
  const double T = opts.horizon_factor * max_tau(spec);
  double dt = opts.dt;
  if (dt <= 0.0) {
    dt = max_tau(spec) / 100.0;
    if (opts.max_points >= 2 && T / dt + 1.0 > static_cast<double>(opts.max_points)) {
      dt = T / static_cast<double>(opts.max_points - 1);
    }
  }
  return TimeGrid(0.0, T, dt);
}

StationaryResult run_stationary(const NetworkSpec& spec, const StationaryOptions& opts) {
  const auto pre = check_stationary_preconditions(spec);
  if (!pre.ok) {
    std::string msg = "stationary preconditions failed:";
    for (const auto& r : pre.reasons) msg += " " + r + ";";
    throw std::invalid_argument(msg);
  }
  const TimeGrid grid = stationary_grid(spec, opts);
  auto [state, report] = solve_fixed_point(spec, grid, opts.solver);
  StationaryResult out;
  out.profile = extract_profile(state, opts.burn_in_factor * max_tau(spec));
  out.regime = classify_regime(out.profile, opts.threshold);
  out.report = std::move(report);
  return out;
}

NetworkSpec spec_with_slope(const NetworkSpec& tmpl, double g) {
  NetworkSpec s = tmpl;
  for (auto& p : s.populations) p.sigmoid = with_slope(p.sigmoid, g);
  return s;
}

GcSearch find_gc(const NetworkSpec& tmpl, double g_low, double g_high, double tol_g, const StationaryOptions& opts) {
  if (!(g_low < g_high) || !(tol_g > 0.0)) {
    throw std::invalid_argument("find_gc: need g_low < g_high and tol_g > 0");
  }
  GcSearch out;
  auto eval = [&](double g) {
    const auto r = run_stationary(spec_with_slope(tmpl, g), opts);
    out.g_evaluated.push_back(g);
    out.regimes.push_back(r.regime);
    out.c0.push_back(*std::max_element(r.profile.c0.begin(), r.profile.c0.end()));
    return r.regime;
  };
  if (eval(g_low) != Regime::kTrivial) {
    throw UnbracketedError("find_gc: g_low = " + std::to_string(g_low) + " is not in the trivial regime");
  }
  if (eval(g_high) != Regime::kChaotic) {
    throw UnbracketedError("find_gc: g_high = " + std::to_string(g_high) + " is not in the chaotic regime");
  }
  double lo = g_low;
  double hi = g_high;
  while (hi - lo >= tol_g) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid) == Regime::kChaotic) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.g_c = 0.5 * (lo + hi);
  return out;
}

}  // namespace mfnet

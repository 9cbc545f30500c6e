#include "commands.hpp"

#include <cmath>
#include <ostream>

#include "mfnet/artifacts.hpp"
#include "mfnet/spec_io.hpp"

namespace mfnet::cli {

namespace {

SolverOptions logged_solver(const RunConfig& c, std::ostream& log) {
  SolverOptions o = solver_options(c);
  o.on_iteration = [&log](int k, double r) { log << "iteration " << k << "  residual " << format_double(r) << '\n'; };
  return o;
}

bool uniform_tau(const NetworkSpec& s) {
  for (const auto& p : s.populations) {
    if (p.tau != s.populations.front().tau) return false;
  }
  return true;
}

std::optional<double> slope_of(const Sigmoid& s) {
  if (const auto* t = std::get_if<Tanh>(&s)) return t->g;
  if (const auto* e = std::get_if<ErfForm>(&s)) return e->g;
  if (const auto* l = std::get_if<Logistic>(&s)) return 1.0 / l->v_s;
  return std::nullopt;
}

}  // namespace

int run_guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SpecError& e) {
    log << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const UnbracketedError& e) {
    log << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DivergenceError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

int cmd_solve(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  validate_ranges(c);
  require_valid(c.network);
  const TimeGrid grid = solve_grid(c);
  auto [state, report] = solve_fixed_point(c.network, grid, logged_solver(c, log));
  write_solve_artifacts(out, state, report, to_json(c), c.timing);
  log << (report.converged ? "converged" : "did not converge") << " after " << report.iterations << " iterations\n";
  return report.converged ? kOk : kNotConverged;
}

int cmd_stationary(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  validate_ranges(c);
  require_valid(c.network);
  const auto pre = check_stationary_preconditions(c.network);
  if (!pre.ok) {
    for (const auto& r : pre.reasons) log << "error: " << r << '\n';
    return kInvalidInput;
  }
  StationaryOptions opts = c.stationary;
  opts.solver = logged_solver(c, log);
  const auto r = run_stationary(c.network, opts);
  std::filesystem::create_directories(out);
  write_text(out / "stationary.csv", stationary_csv(r.profile));
  write_json(out / "regime.json", regime_json(r, slope_of(c.network.populations.front().sigmoid), opts.threshold, to_json(c)));
  log << "regime: " << to_string(r.regime) << "  C(0) = " << format_double(r.profile.c0.front()) << '\n';
  return r.report.converged ? kOk : kNotConverged;
}

int cmd_sweep(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  validate_ranges(c);
  require_valid(c.network);
  if (c.sweep.values.empty()) throw ConfigError("sweep.values: empty parameter grid");
  SweepOptions opts = c.sweep.options;
  opts.solver = solver_options(c);
  opts.threads = c.threads;
  // the solver inside each point stays serial when points already run in parallel
  if (c.threads != 1) opts.solver.apply.threads = 1;
  const auto param = sweep_parameter_from_string(c.sweep.parameter);
  const auto r = sweep(c.network, param, c.sweep.values, opts);
  std::filesystem::create_directories(out);
  write_text(out / "sweep.csv", sweep_csv(r));
  if (c.network.size() == 2 && uniform_tau(c.network)) {
    const double g = slope_of(c.network.populations.front().sigmoid).value_or(1.0);
    write_json(out / "hopf.json", hopf_json(analyze_hopf(c.network.connectivity.j_bar, c.network.populations.front().tau, g),
                                            to_json(c)));
  }
  int code = kOk;
  for (const auto& p : r.points) {
    log << to_string(param) << " = " << format_double(p.value) << "  " << p.regime;
    if (!p.error.empty()) log << "  (" << p.error << ')';
    log << '\n';
    if (p.regime == "failed") {
      code = kNumericalFailure;
    } else if (!p.converged && code == kOk) {
      code = kNotConverged;
    }
  }
  if (const auto split = branch_split_value(r)) log << "branch split at " << format_double(*split) << '\n';
  return code;
}

int cmd_mc_validate(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  validate_ranges(c);
  require_valid(c.network);
  McConfig mc = mc_config(c);
  validate_mc_config(mc, c.network);
  const TimeGrid grid = solve_grid(c);
  auto [state, report] = solve_fixed_point(c.network, grid, logged_solver(c, log));
  if (!report.converged) log << "warning: mean-field solve did not converge\n";
  const auto m = run_monte_carlo(c.network, grid, mc);
  const auto cmp = compare_mc_mf(c.network, m, state, c.solver.quadrature_order);
  std::filesystem::create_directories(out);
  write_text(out / "mc_moments.csv", mc_moments_csv(m));
  write_json(out / "mc_compare.json", mc_compare_json(cmp, m, to_json(c)));
  const double worst = std::max(cmp.max_z_mean, cmp.max_z_var);
  log << "max z (mean) " << format_double(cmp.max_z_mean) << "  max z (variance) " << format_double(cmp.max_z_var)
      << "  limit " << format_double(c.mc.z_max) << '\n';
  if (!report.converged) return kNotConverged;
  if (!(worst <= c.mc.z_max)) {
    log << "check failed: mc-vs-meanfield z-score\n";
    return kNotConverged;
  }
  return kOk;
}

}  // namespace mfnet::cli

#include "run_config.hpp"

#include <cmath>
#include <fstream>

#include "mfnet/spec_io.hpp"

namespace mfnet::cli {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  const json* s = find(root, key);
  if (!s) return empty;
  if (!s->is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return *s;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

template <class T>
void read(const json& s, const char* key, const std::string& sec, T& out) {
  const json* v = find(s, key);
  if (!v) return;
  const std::string path = sec + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v->is_boolean()) throw ConfigError(path + ": expected true or false");
    out = v->get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v->is_number_integer() || (std::is_unsigned_v<T> && v->get<long long>() < 0)) {
      throw ConfigError(path + ": expected a non-negative integer");
    }
    out = v->get<T>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v->is_string()) throw ConfigError(path + ": expected a string");
    out = v->get<std::string>();
  } else {
    out = num(*v, path);
  }
}

void read_opt(const json& s, const char* key, const std::string& sec, std::optional<double>& out) {
  if (const json* v = find(s, key)) out = num(*v, sec + "." + key);
}

std::vector<double> values_of(const json& s, const std::string& sec) {
  if (const json* v = find(s, "values")) {
    if (!v->is_array()) throw ConfigError(sec + ".values: expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(num((*v)[i], sec + ".values[" + std::to_string(i) + "]"));
    return out;
  }
  if (find(s, "start") || find(s, "stop") || find(s, "step")) {
    double start = 0.0, stop = 0.0, step = 0.0;
    for (const char* k : {"start", "stop", "step"}) {
      if (!find(s, k)) throw ConfigError(sec + "." + k + ": missing");
    }
    read(s, "start", sec, start);
    read(s, "stop", sec, stop);
    read(s, "step", sec, step);
    if (!(step > 0.0)) throw ConfigError(sec + ".step: must be > 0");
    std::vector<double> out;
    // integer multiples of step, so no drift accumulates along the grid
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  return {};
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  RunConfig c;
  const json* net = find(j, "network");
  if (!net) throw ConfigError("network: missing");
  c.network = spec_from_json(*net);

  const auto& g = section(j, "grid");
  read(g, "t0", "grid", c.grid.t0);
  read_opt(g, "t_end", "grid", c.grid.t_end);
  read_opt(g, "dt", "grid", c.grid.dt);

  const auto& s = section(j, "solver");
  read(s, "tol", "solver", c.solver.tol);
  read(s, "max_iter", "solver", c.solver.max_iter);
  read(s, "quadrature_order", "solver", c.solver.quadrature_order);
  read(s, "use_erf_closed_form", "solver", c.solver.use_erf_closed_form);
  read(s, "threads", "solver", c.threads);

  const auto& st = section(j, "stationary");
  read(st, "horizon_factor", "stationary", c.stationary.horizon_factor);
  read(st, "burn_in_factor", "stationary", c.stationary.burn_in_factor);
  read(st, "threshold", "stationary", c.stationary.threshold);
  read(st, "max_points", "stationary", c.stationary.max_points);
  read(st, "dt", "stationary", c.stationary.dt);

  const auto& m = section(j, "mc");
  if (const json* sz = find(m, "sizes")) {
    if (!sz->is_array()) throw ConfigError("mc.sizes: expected an array");
    for (std::size_t i = 0; i < sz->size(); ++i) {
      const auto& e = (*sz)[i];
      if (!e.is_number_integer() || e.get<long long>() < 1) {
        throw ConfigError("mc.sizes[" + std::to_string(i) + "]: expected a positive integer");
      }
      c.mc.sizes.push_back(e.get<std::size_t>());
    }
  }
  read(m, "trials", "mc", c.mc.trials);
  read(m, "seed", "mc", c.mc.seed);
  read(m, "dt_sde", "mc", c.mc.dt_sde);
  read(m, "resample_weights_per_trial", "mc", c.mc.resample_weights_per_trial);
  read(m, "z_max", "mc", c.mc.z_max);

  const auto& w = section(j, "sweep");
  read(w, "parameter", "sweep", c.sweep.parameter);
  c.sweep.values = values_of(w, "sweep");
  auto& so = c.sweep.options;
  read(w, "t_end", "sweep", so.t_end);
  read(w, "dt", "sweep", so.dt);
  read(w, "t1", "sweep", so.t1);
  read(w, "t2", "sweep", so.t2);
  read(w, "both_branches", "sweep", so.both_branches);
  read(w, "branch_delta", "sweep", so.branch_delta);
  read(w, "split_threshold", "sweep", so.split_threshold);
  read(w, "oscillation_burn_in", "sweep", so.oscillation_burn_in);

  const auto& o = section(j, "output");
  read(o, "timing", "output", c.timing);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["network"] = mfnet::to_json(c.network);
  j["grid"] = {{"t0", c.grid.t0}};
  if (c.grid.t_end) j["grid"]["t_end"] = *c.grid.t_end;
  if (c.grid.dt) j["grid"]["dt"] = *c.grid.dt;
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"quadrature_order", c.solver.quadrature_order},
                 {"use_erf_closed_form", c.solver.use_erf_closed_form},
                 {"threads", c.threads}};
  j["stationary"] = {{"horizon_factor", c.stationary.horizon_factor},
                     {"burn_in_factor", c.stationary.burn_in_factor},
                     {"threshold", c.stationary.threshold},
                     {"max_points", c.stationary.max_points},
                     {"dt", c.stationary.dt}};
  j["mc"] = {{"sizes", c.mc.sizes},
             {"trials", c.mc.trials},
             {"seed", c.mc.seed},
             {"dt_sde", c.mc.dt_sde},
             {"resample_weights_per_trial", c.mc.resample_weights_per_trial},
             {"z_max", c.mc.z_max}};
  const auto& so = c.sweep.options;
  j["sweep"] = {{"parameter", c.sweep.parameter},
                {"values", c.sweep.values},
                {"t_end", so.t_end},
                {"dt", so.dt},
                {"t1", so.t1},
                {"t2", so.t2},
                {"both_branches", so.both_branches},
                {"branch_delta", so.branch_delta},
                {"split_threshold", so.split_threshold},
                {"oscillation_burn_in", so.oscillation_burn_in}};
  j["output"] = {{"timing", c.timing}};
  return j;
}

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.dt) {
    c.grid.dt = *o.dt;
    c.stationary.dt = *o.dt;
    c.sweep.options.dt = *o.dt;
  }
  if (o.tol) c.solver.tol = *o.tol;
  if (o.max_iter) c.solver.max_iter = *o.max_iter;
  if (o.seed) c.mc.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
}

void validate_ranges(const RunConfig& c) {
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol: must be > 0");
  if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (c.solver.quadrature_order < 1 || c.solver.quadrature_order > kMaxGhOrder) {
    throw ConfigError("solver.quadrature_order: must lie in [1, " + std::to_string(kMaxGhOrder) + "]");
  }
  if (c.grid.dt && !(*c.grid.dt > 0.0)) throw ConfigError("grid.dt: must be > 0");
  if (c.grid.t_end && !(*c.grid.t_end > c.grid.t0)) throw ConfigError("grid.t_end: must exceed grid.t0");
  if (!(c.stationary.horizon_factor > c.stationary.burn_in_factor) || !(c.stationary.burn_in_factor >= 0.0)) {
    throw ConfigError("stationary.burn_in_factor: must lie in [0, horizon_factor)");
  }
  if (c.stationary.dt < 0.0) throw ConfigError("stationary.dt: must be >= 0");
  if (c.mc.trials < 2) throw ConfigError("mc.trials: must be >= 2");
  if (c.mc.dt_sde < 0.0) throw ConfigError("mc.dt_sde: must be >= 0");
  if (!(c.sweep.options.dt > 0.0)) throw ConfigError("sweep.dt: must be > 0");
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.solver.tol;
  o.max_iter = c.solver.max_iter;
  o.quadrature_order = c.solver.quadrature_order;
  o.apply.use_erf_closed_form = c.solver.use_erf_closed_form;
  o.apply.threads = c.threads;
  return o;
}

TimeGrid solve_grid(const RunConfig& c) {
  if (!c.grid.t_end) throw ConfigError("grid.t_end: missing");
  const double dt = c.grid.dt ? *c.grid.dt : default_dt(c.network, c.grid.t0, *c.grid.t_end);
  return TimeGrid(c.grid.t0, *c.grid.t_end, dt);
}

McConfig mc_config(const RunConfig& c) {
  McConfig m;
  m.sizes = c.mc.sizes;
  m.trials = c.mc.trials;
  m.seed = c.mc.seed;
  m.dt_sde = c.mc.dt_sde;
  m.resample_weights_per_trial = c.mc.resample_weights_per_trial;
  m.threads = c.threads;
  return m;
}

}  // namespace mfnet::cli

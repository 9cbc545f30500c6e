#pragma once

// Run configuration for the command-line tool: the network plus grid, solver,
// stationary, Monte Carlo and sweep sections. Schema: docs/config_schema.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfnet/analysis.hpp"
#include "mfnet/mc.hpp"
#include "mfnet/meanfield.hpp"
#include "mfnet/model.hpp"
#include "mfnet/stationary.hpp"

namespace mfnet::cli {

struct GridConfig {
  double t0 = 0.0;
  std::optional<double> t_end;
  std::optional<double> dt;  ///< unset: default_dt of the network
};

struct SolverConfig {
  double tol = 1e-6;
  int max_iter = 200;
  int quadrature_order = kDefaultGhOrder;
  bool use_erf_closed_form = true;
};

struct McSection {
  std::vector<std::size_t> sizes;
  int trials = 100;
  std::uint64_t seed = 1;
  double dt_sde = 0.0;
  bool resample_weights_per_trial = true;
  double z_max = 4.0;
};

struct SweepSection {
  std::string parameter = "g";
  std::vector<double> values;
  SweepOptions options;  ///< solver part is filled from the solver section
};

struct RunConfig {
  NetworkSpec network;
  GridConfig grid;
  SolverConfig solver;
  StationaryOptions stationary;  ///< solver part is filled from the solver section
  McSection mc;
  SweepSection sweep;
  unsigned threads = 1;
  bool timing = false;  ///< wall-clock times in report.json (breaks byte-identity)
};

/// Throws ConfigError naming the field on any structural problem.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved configuration, echoed into every JSON artifact.
nlohmann::json to_json(const RunConfig& c);

struct Overrides {
  std::optional<double> dt;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void apply_overrides(RunConfig& c, const Overrides& o);

/// Checks documented numeric ranges; throws ConfigError.
void validate_ranges(const RunConfig& c);

SolverOptions solver_options(const RunConfig& c);
TimeGrid solve_grid(const RunConfig& c);
McConfig mc_config(const RunConfig& c);

}  // namespace mfnet::cli

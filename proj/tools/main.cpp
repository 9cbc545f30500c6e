#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mfnet/artifacts.hpp"

using namespace mfnet::cli;

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<double> dt;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--dt", f.dt, "grid step override")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "fixed-point tolerance override")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", f.max_iter, "iteration cap override")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Monte Carlo seed override");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

int run(const CommonFlags& f, int (*command)(const RunConfig&, const std::filesystem::path&, std::ostream&)) {
  return run_guarded(std::cerr, [&] {
    RunConfig c = load_run_config(f.config);
    apply_overrides(c, {f.dt, f.tol, f.max_iter, f.seed, f.threads});
    return command(c, f.out, std::cerr);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field moments of random rate networks"};
  app.set_version_flag("--version", mfnet::version());
  app.require_subcommand(1);

  CommonFlags solve_f, stat_f, sweep_f, mc_f;
  auto* solve = app.add_subcommand("solve", "iterate the mean-field map to its fixed point");
  add_common(solve, solve_f);
  auto* stat = app.add_subcommand("stationary", "stationary covariance profile and regime");
  add_common(stat, stat_f);
  auto* sw = app.add_subcommand("sweep", "parameter sweep with branch and oscillation detection");
  add_common(sw, sweep_f);
  auto* mc = app.add_subcommand("mc-validate", "finite-network Monte Carlo against the mean field");
  add_common(mc, mc_f);
  auto* self = app.add_subcommand("selftest", "run the embedded oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }

  if (*solve) return run(solve_f, cmd_solve);
  if (*stat) return run(stat_f, cmd_stationary);
  if (*sw) return run(sweep_f, cmd_sweep);
  if (*mc) return run(mc_f, cmd_mc_validate);
  if (*self) return run_guarded(std::cerr, [] { return cmd_selftest(std::cout); });
  return kInvalidInput;
}

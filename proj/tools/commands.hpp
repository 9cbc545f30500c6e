#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "run_config.hpp"

namespace mfnet::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kNotConverged = 2,  ///< also: a validation check failed
  kNumericalFailure = 3,
};

int cmd_solve(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_stationary(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_mc_validate(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
int cmd_selftest(std::ostream& log);

/// Runs body, mapping invalid-input exceptions to 1 and numerical failures
/// to 3; the message goes to `log`.
int run_guarded(std::ostream& log, const std::function<int()>& body);

}  // namespace mfnet::cli

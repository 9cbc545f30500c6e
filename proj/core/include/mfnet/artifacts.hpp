#pragma once

// CSV and JSON output. Numbers are written in shortest round-trip form with
// '.' as decimal separator; every CSV starts with a header row and every JSON
// document carries the library version and the resolved configuration.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mfnet/analysis.hpp"
#include "mfnet/mc.hpp"
#include "mfnet/meanfield.hpp"
#include "mfnet/stationary.hpp"

namespace mfnet {

std::string version();

/// Shortest decimal that parses back to exactly x; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& content);

std::string means_csv(const MomentState& state);
/// Long format t,s,c over the pairs t <= s.
std::string cov_csv(const MomentState& state, std::size_t population);
std::string stationary_csv(const StationaryProfile& profile);
std::string mc_moments_csv(const EmpiricalMoments& m);
std::string sweep_csv(const SweepResult& r);

nlohmann::json report_json(const SolveReport& report, const nlohmann::json& config, bool include_timing = false);
nlohmann::json regime_json(const StationaryResult& r, std::optional<double> g, double threshold,
                           const nlohmann::json& config);
nlohmann::json mc_compare_json(const McComparison& c, const EmpiricalMoments& m, const nlohmann::json& config);
nlohmann::json hopf_json(const HopfAnalysis& h, const nlohmann::json& config);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// means.csv, cov_<a>.csv (1-based) and report.json.
void write_solve_artifacts(const std::filesystem::path& dir, const MomentState& state, const SolveReport& report,
                           const nlohmann::json& config, bool include_timing = false);

}  // namespace mfnet

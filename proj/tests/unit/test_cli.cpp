#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "mfnet/spec_io.hpp"
#include "run_config.hpp"

using namespace mfnet;
using namespace mfnet::cli;
using nlohmann::json;

namespace {

json zero_coupling_doc() {
  return json{{"network", to_json(test::one_population(1.0, 1.0, Tanh{1.0}, 0.0, 0.0, 0.5))},
              {"grid", {{"t_end", 2.0}, {"dt", 0.05}}},
              {"mc", {{"sizes", {20}}, {"trials", 20}, {"seed", 3}}}};
}

int run(int (*cmd)(const RunConfig&, const std::filesystem::path&, std::ostream&), const json& doc,
        const std::string& dir, std::string* log = nullptr) {
  std::ostringstream os;
  const int code = run_guarded(os, [&] { return cmd(run_config_from_json(doc), test::scratch_dir(dir), os); });
  if (log) *log = os.str();
  return code;
}

}  // namespace

TEST_CASE("run config defaults and round trip") {
  const auto c = run_config_from_json(zero_coupling_doc());
  CHECK(c.solver.tol == 1e-6);
  CHECK(c.mc.sizes == std::vector<std::size_t>{20});
  CHECK(*c.grid.t_end == 2.0);
  const auto again = run_config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("sweep grid from start/stop/step") {
  auto doc = zero_coupling_doc();
  doc["sweep"] = {{"parameter", "g"}, {"start", 3.0}, {"stop", 3.5}, {"step", 0.1}};
  const auto c = run_config_from_json(doc);
  REQUIRE(c.sweep.values.size() == 6);
  CHECK(c.sweep.values.back() == doctest::Approx(3.5));
  doc["sweep"].erase("step");
  CHECK_THROWS_AS(run_config_from_json(doc), ConfigError);
}

TEST_CASE("overrides") {
  auto c = run_config_from_json(zero_coupling_doc());
  apply_overrides(c, {0.01, 1e-9, 7, 99, 2});
  CHECK(*c.grid.dt == 0.01);
  CHECK(c.solver.tol == 1e-9);
  CHECK(c.solver.max_iter == 7);
  CHECK(c.mc.seed == 99);
  CHECK(c.threads == 2);
}

TEST_CASE("invalid network exits 1 and names the field") {
  auto doc = zero_coupling_doc();
  doc["network"]["populations"][0]["tau"] = -1.0;
  std::string log;
  CHECK(run(cmd_solve, doc, "neg_tau", &log) == kInvalidInput);
  CHECK(log.find("populations[0].tau") != std::string::npos);
  doc = zero_coupling_doc();
  doc["network"]["populations"][0].erase("sigmoid");
  CHECK(run(cmd_solve, doc, "no_sigmoid", &log) == kInvalidInput);
  CHECK(log.find("sigmoid") != std::string::npos);
}

TEST_CASE("zero-coupling solve exits 0 with artifacts") {
  std::string log;
  CHECK(run(cmd_solve, zero_coupling_doc(), "solve", &log) == kOk);
  const auto dir = std::filesystem::path(MFNET_TEST_TMP) / "solve";
  CHECK(std::filesystem::exists(dir / "means.csv"));
  CHECK(std::filesystem::exists(dir / "cov_1.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(log.find("iteration 1") != std::string::npos);
}

TEST_CASE("missing horizon is invalid input") {
  auto doc = zero_coupling_doc();
  doc["grid"].erase("t_end");
  CHECK(run(cmd_solve, doc, "no_t_end") == kInvalidInput);
}

TEST_CASE("stationary rejects time-varying input") {
  auto doc = zero_coupling_doc();
  doc["network"]["populations"][0]["input"] = {{"kind", "sinusoid"}, {"amplitude", 1.0}, {"period", 2.0}};
  std::string log;
  CHECK(run(cmd_stationary, doc, "stat_sin", &log) == kInvalidInput);
  CHECK(log.find("non-constant input") != std::string::npos);
}

TEST_CASE("stationary run writes profile and regime") {
  auto doc = zero_coupling_doc();
  doc["stationary"] = {{"horizon_factor", 10.0}, {"burn_in_factor", 5.0}};
  CHECK(run(cmd_stationary, doc, "stat") == kOk);
  const auto dir = std::filesystem::path(MFNET_TEST_TMP) / "stat";
  CHECK(std::filesystem::exists(dir / "stationary.csv"));
  CHECK(std::filesystem::exists(dir / "regime.json"));
}

TEST_CASE("empty sweep exits 1") {
  auto doc = zero_coupling_doc();
  doc["sweep"] = {{"parameter", "g"}, {"values", json::array()}};
  CHECK(run(cmd_sweep, doc, "sweep_empty") == kInvalidInput);
  doc["sweep"] = {{"parameter", "tau"}, {"values", {1.0}}};
  CHECK(run(cmd_sweep, doc, "sweep_bad_param") == kInvalidInput);
}

TEST_CASE("small sweep exits 0") {
  auto doc = zero_coupling_doc();
  doc["sweep"] = {{"parameter", "j_scale"}, {"values", {0.5, 1.0}}, {"t_end", 4.0}, {"t1", 3.0}, {"t2", 4.0}, {"oscillation_burn_in", 1.0}};
  CHECK(run(cmd_sweep, doc, "sweep") == kOk);
  CHECK(std::filesystem::exists(std::filesystem::path(MFNET_TEST_TMP) / "sweep" / "sweep.csv"));
}

TEST_CASE("mc-validate on an OU network") {
  CHECK(run(cmd_mc_validate, zero_coupling_doc(), "mc") == kOk);
  auto doc = zero_coupling_doc();
  doc["mc"]["sizes"] = {20, 20};
  CHECK(run(cmd_mc_validate, doc, "mc_bad") == kInvalidInput);
}

TEST_CASE("selftest passes") {
  std::ostringstream os;
  CHECK(cmd_selftest(os) == kOk);
}

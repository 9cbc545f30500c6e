#include "mfnet/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef MFNET_VERSION
#define MFNET_VERSION "0.0.0"
#endif

namespace mfnet {

std::string version() { return MFNET_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::string col(const std::string& name, std::size_t a) { return name + "_" + std::to_string(a + 1); }

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json vec_json(const std::vector<double>& v) {
  auto j = nlohmann::json::array();
  for (double x : v) j.push_back(finite_or_null(x));
  return j;
}

nlohmann::json nested_json(const std::vector<std::vector<double>>& v) {
  auto j = nlohmann::json::array();
  for (const auto& r : v) j.push_back(vec_json(r));
  return j;
}

nlohmann::json header(const nlohmann::json& config) { return {{"version", version()}, {"config", config}}; }

}  // namespace

std::string means_csv(const MomentState& state) {
  std::ostringstream os;
  const std::size_t P = state.populations();
  os << "t";
  for (std::size_t a = 0; a < P; ++a) os << ',' << col("mu", a);
  os << '\n';
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    os << format_double(state.grid[i]);
    for (std::size_t a = 0; a < P; ++a) {
      os << ',' << format_double(state.mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)));
    }
    os << '\n';
  }
  return os.str();
}

std::string cov_csv(const MomentState& state, std::size_t population) {
  if (population >= state.populations()) throw std::out_of_range("cov_csv: population index");
  const auto& c = state.cov[population];
  const std::size_t n = state.grid.size();
  std::ostringstream os;
  os << "t,s,c\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string t = format_double(state.grid[i]);
    for (std::size_t j = i; j < n; ++j) os << t << ',' << format_double(state.grid[j]) << ',' << format_double(c(i, j)) << '\n';
  }
  return os.str();
}

std::string stationary_csv(const StationaryProfile& p) {
  std::ostringstream os;
  os << "tau";
  for (std::size_t a = 0; a < p.populations(); ++a) os << ',' << col("c", a);
  os << ",defect\n";
  const std::string defect = format_double(p.stationarity_defect);
  for (std::size_t k = 0; k < p.lags.size(); ++k) {
    os << format_double(p.lags[k]);
    for (std::size_t a = 0; a < p.populations(); ++a) os << ',' << format_double(p.c_of_tau[a][k]);
    os << ',' << defect << '\n';
  }
  return os.str();
}

std::string mc_moments_csv(const EmpiricalMoments& m) {
  std::ostringstream os;
  const std::size_t P = m.mean.size();
  os << "t";
  for (std::size_t a = 0; a < P; ++a) {
    os << ',' << col("mean", a) << ',' << col("mean_se", a) << ',' << col("var", a) << ',' << col("var_se", a);
  }
  os << '\n';
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    os << format_double(m.grid[i]);
    for (std::size_t a = 0; a < P; ++a) {
      os << ',' << format_double(m.mean[a][i].value) << ',' << format_double(m.mean[a][i].se) << ','
         << format_double(m.variance[a][i].value) << ',' << format_double(m.variance[a][i].se);
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::size_t P = 0;
  for (const auto& p : r.points) P = std::max(P, p.mean_plus.size());
  std::ostringstream os;
  os << to_string(r.parameter);
  for (std::size_t a = 0; a < P; ++a) {
    os << ',' << col("asymptotic_mean_plus", a) << ',' << col("asymptotic_mean_minus", a) << ',' << col("c0", a);
  }
  os << ",amplitude,period,regime,converged,iterations\n";
  auto at = [](const std::vector<double>& v, std::size_t a) {
    return a < v.size() ? format_double(v[a]) : std::string("nan");
  };
  for (const auto& p : r.points) {
    os << format_double(p.value);
    for (std::size_t a = 0; a < P; ++a) os << ',' << at(p.mean_plus, a) << ',' << at(p.mean_minus, a) << ',' << at(p.c0, a);
    os << ',' << format_double(p.amplitude) << ',' << format_double(p.period) << ',' << p.regime << ','
       << (p.converged ? 1 : 0) << ',' << p.iterations << '\n';
  }
  return os.str();
}

nlohmann::json report_json(const SolveReport& r, const nlohmann::json& config, bool include_timing) {
  auto j = header(config);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residual_history"] = vec_json(r.residual_history);
  j["mean_residuals"] = vec_json(r.mean_residuals);
  j["cov_residuals"] = vec_json(r.cov_residuals);
  j["bound_estimate"] = finite_or_null(r.bound_estimate);
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

nlohmann::json regime_json(const StationaryResult& r, std::optional<double> g, double threshold,
                           const nlohmann::json& config) {
  auto j = header(config);
  j["g"] = g ? nlohmann::json(*g) : nlohmann::json(nullptr);
  j["classification"] = to_string(r.regime);
  j["c0"] = vec_json(r.profile.c0);
  j["threshold"] = threshold;
  j["stationarity_defect"] = r.profile.stationarity_defect;
  j["converged"] = r.report.converged;
  j["iterations"] = r.report.iterations;
  return j;
}

nlohmann::json mc_compare_json(const McComparison& c, const EmpiricalMoments& m, const nlohmann::json& config) {
  auto j = header(config);
  std::vector<double> times;
  for (auto i : c.checkpoints) times.push_back(m.grid[i]);
  j["checkpoint_times"] = vec_json(times);
  j["trials"] = m.trials;
  j["z_mean"] = nested_json(c.z_mean);
  j["z_var"] = nested_json(c.z_var);
  j["z_u_mean"] = nested_json(c.z_u_mean);
  j["z_u_var"] = nested_json(c.z_u_var);
  j["max_z_mean"] = finite_or_null(c.max_z_mean);
  j["max_z_var"] = finite_or_null(c.max_z_var);
  j["max_z_u_mean"] = finite_or_null(c.max_z_u_mean);
  j["max_z_u_var"] = finite_or_null(c.max_z_u_var);
  j["max_z"] = finite_or_null(c.max_z);
  j["corr_vu"] = nested_json(m.corr_vu);
  j["corr_vu_summary"] = m.corr_vu_summary;
  return j;
}

nlohmann::json hopf_json(const HopfAnalysis& h, const nlohmann::json& config) {
  auto j = header(config);
  auto cplx = [](std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); };
  j["eigenvalues"] = {cplx(h.eigs.lambda[0]), cplx(h.eigs.lambda[1])};
  j["system_eigenvalues"] = {cplx(h.eigs.system[0]), cplx(h.eigs.system[1])};
  j["g_c"] = h.threshold.g_c ? nlohmann::json(*h.threshold.g_c) : nlohmann::json(nullptr);
  if (!h.threshold.g_c) j["g_c_absent_reason"] = h.threshold.reason;
  j["feedback_loop"] = h.feedback_loop;
  if (h.h_of_v) j["h_of_v"] = *h.h_of_v;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_solve_artifacts(const std::filesystem::path& dir, const MomentState& state, const SolveReport& report,
                           const nlohmann::json& config, bool include_timing) {
  std::filesystem::create_directories(dir);
  write_text(dir / "means.csv", means_csv(state));
  for (std::size_t a = 0; a < state.populations(); ++a) {
    write_text(dir / ("cov_" + std::to_string(a + 1) + ".csv"), cov_csv(state, a));
  }
  write_json(dir / "report.json", report_json(report, config, include_timing));
}

}  // namespace mfnet

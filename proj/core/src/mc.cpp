#include "mfnet/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mfnet/parallel.hpp"
#include "mfnet/quadrature.hpp"

namespace mfnet {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) noexcept {
  constexpr std::uint64_t kM0 = 0xD2511F53u;
  constexpr std::uint64_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = kM0 * c[0];
    const std::uint64_t p1 = kM1 * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::array<std::uint32_t, 4> counter) noexcept {
  const auto w = philox4x32(counter, {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const std::uint64_t a = ((static_cast<std::uint64_t>(w[0]) << 32) | w[1]) >> 11;
  const std::uint64_t b = ((static_cast<std::uint64_t>(w[2]) << 32) | w[3]) >> 11;
  const double u1 = (static_cast<double>(a) + 1.0) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(b) * kScale;          // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

namespace {

std::array<std::uint32_t, 4> ctr(std::uint64_t a, std::uint64_t b, std::uint32_t trial, StreamTag tag) {
  return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), trial, static_cast<std::uint32_t>(tag)};
}

std::size_t total(const std::vector<std::size_t>& sizes) { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

std::vector<std::size_t> offsets(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> off(sizes.size() + 1, 0);
  for (std::size_t a = 0; a < sizes.size(); ++a) off[a + 1] = off[a] + sizes[a];
  return off;
}

// Fills out[0..n) with standard normals from consecutive pairs of one stream.
template <class CounterFn>
void fill_normals(std::uint64_t seed, std::size_t n, double* out, CounterFn&& counter) {
  for (std::size_t i = 0; i < n; i += 2) {
    const auto z = normal_pair(seed, counter(i / 2));
    out[i] = z[0];
    if (i + 1 < n) out[i + 1] = z[1];
  }
}

// running mean: exact when every value is the same
double running_mean(const std::vector<double>& x) {
  double mean = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) mean += (x[k] - mean) / static_cast<double>(k + 1);
  return mean;
}

Estimate estimate(const std::vector<double>& x) {
  const auto T = static_cast<double>(x.size());
  const double mean = running_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = x.size() > 1 ? std::sqrt(ss / (T - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(T)};
}

double zscore(double mc, double se, double mf) {
  const double d = std::abs(mc - mf);
  if (se > 0.0) return d / se;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

void validate_mc_config(const McConfig& mc, const NetworkSpec& spec) {
  if (mc.sizes.size() != spec.size()) {
    throw std::invalid_argument("mc.sizes: expected " + std::to_string(spec.size()) + " entries");
  }
  for (std::size_t a = 0; a < mc.sizes.size(); ++a) {
    if (mc.sizes[a] < 1) throw std::invalid_argument("mc.sizes[" + std::to_string(a) + "]: must be >= 1");
  }
  if (mc.trials < 2) throw std::invalid_argument("mc.trials: must be >= 2");
  if (!(mc.dt_sde >= 0.0) || !std::isfinite(mc.dt_sde)) throw std::invalid_argument("mc.dt_sde: must be > 0");
}

std::vector<std::size_t> default_checkpoints(std::size_t grid_size, std::size_t count) {
  std::vector<std::size_t> out;
  if (grid_size < 2 || count == 0) return out;
  const std::size_t last = grid_size - 1;
  count = std::min(count, last);
  for (std::size_t c = 1; c <= count; ++c) out.push_back(last * c / count);
  return out;
}

std::vector<std::size_t> neuron_populations(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> pop;
  pop.reserve(total(sizes));
  for (std::size_t a = 0; a < sizes.size(); ++a) pop.insert(pop.end(), sizes[a], a);
  return pop;
}

Eigen::MatrixXd sample_weights(const ConnectivityStats& stats, const std::vector<std::size_t>& sizes,
                               std::uint64_t seed, std::uint32_t trial) {
  const std::size_t N = total(sizes);
  const auto pop = neuron_populations(sizes);
  Eigen::MatrixXd W(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  std::vector<double> z(N);
  for (std::size_t i = 0; i < N; ++i) {
    fill_normals(seed, N, z.data(), [&](std::size_t k) { return ctr(i, k, trial, StreamTag::kWeights); });
    const auto a = static_cast<Eigen::Index>(pop[i]);
    for (std::size_t j = 0; j < N; ++j) {
      const auto b = static_cast<Eigen::Index>(pop[j]);
      const double nb = static_cast<double>(sizes[pop[j]]);
      const double s = stats.sigma(a, b);
      W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          stats.j_bar(a, b) / nb + (s == 0.0 ? 0.0 : s / std::sqrt(nb) * z[j]);
    }
  }
  return W;
}

std::size_t substeps(const McConfig& mc, const TimeGrid& grid) {
  if (mc.dt_sde <= 0.0) return 5;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(grid.dt() / mc.dt_sde)));
}

Eigen::MatrixXd simulate_network(const NetworkSpec& spec, const Eigen::MatrixXd& weights, const McConfig& mc,
                                 const TimeGrid& grid, std::uint32_t trial) {
  const std::size_t N = total(mc.sizes);
  const auto Ni = static_cast<Eigen::Index>(N);
  if (weights.rows() != Ni || weights.cols() != Ni) {
    throw std::invalid_argument("simulate_network: weight matrix does not match mc.sizes");
  }
  const auto pop = neuron_populations(mc.sizes);
  const std::size_t sub = substeps(mc, grid);
  const double h = grid.dt() / static_cast<double>(sub);
  const double sqrt_h = std::sqrt(h);
  const std::size_t P = spec.size();

  Eigen::VectorXd v(Ni), rates(Ni), drive(Ni);
  std::vector<double> z(N);
  fill_normals(mc.seed, N, z.data(), [&](std::size_t k) { return ctr(k, 0, trial, StreamTag::kInitial); });
  for (std::size_t i = 0; i < N; ++i) {
    v(static_cast<Eigen::Index>(i)) = spec.initial_mean[pop[i]] + std::sqrt(spec.initial_variance[pop[i]]) * z[i];
  }

  Eigen::MatrixXd out(Ni, static_cast<Eigen::Index>(grid.size()));
  out.col(0) = v;
  std::vector<double> input(P);
  std::size_t step = 0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    for (std::size_t s = 0; s < sub; ++s, ++step) {
      const double t = grid[g] + h * static_cast<double>(s);
      for (std::size_t a = 0; a < P; ++a) input[a] = eval_input(spec.populations[a].input, t);
      for (std::size_t i = 0; i < N; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        rates(ii) = eval_sigmoid(spec.populations[pop[i]].sigmoid, v(ii));
      }
      drive.noalias() = weights * rates;
      fill_normals(mc.seed, N, z.data(), [&](std::size_t k) { return ctr(step, k, trial, StreamTag::kNoise); });
      for (std::size_t i = 0; i < N; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto& p = spec.populations[pop[i]];
        v(ii) += h * (-v(ii) / p.tau + drive(ii) + input[pop[i]]) + p.f * sqrt_h * z[i];
      }
    }
    if (!v.allFinite()) throw DivergenceError(trial, step);
    out.col(static_cast<Eigen::Index>(g + 1)) = v;
  }
  return out;
}

namespace {

Eigen::MatrixXd trial_weights(const NetworkSpec& spec, const McConfig& mc, std::uint32_t trial) {
  return sample_weights(spec.connectivity, mc.sizes, mc.seed, mc.resample_weights_per_trial ? trial : 0u);
}

McConfig with_checkpoints(McConfig mc, const TimeGrid& grid) {
  if (mc.checkpoints.empty()) mc.checkpoints = default_checkpoints(grid.size());
  for (auto c : mc.checkpoints) {
    if (c >= grid.size()) throw std::invalid_argument("mc.checkpoints: index beyond the grid");
  }
  return mc;
}

}  // namespace

McEnsemble simulate_ensemble(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc_in) {
  require_valid(spec);
  validate_mc_config(mc_in, spec);
  McEnsemble e;
  e.grid = grid;
  e.config = with_checkpoints(mc_in, grid);
  const auto T = static_cast<std::size_t>(e.config.trials);
  e.trajectories.resize(T);
  e.weights.resize(e.config.resample_weights_per_trial ? T : 1);
  if (!e.config.resample_weights_per_trial) e.weights[0] = trial_weights(spec, e.config, 0);
  parallel_for(0, T, e.config.threads, [&](std::size_t k) {
    const auto trial = static_cast<std::uint32_t>(k);
    if (e.config.resample_weights_per_trial) e.weights[k] = trial_weights(spec, e.config, trial);
    const auto& W = e.weights[e.config.resample_weights_per_trial ? k : 0];
    e.trajectories[k] = simulate_network(spec, W, e.config, grid, trial);
  });
  return e;
}

TrialSummary summarize_trial(const NetworkSpec& spec, const McConfig& mc, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& traj) {
  const std::size_t P = spec.size();
  const auto off = offsets(mc.sizes);
  const auto n = traj.cols();
  const auto last = n - 1;
  const std::size_t C = mc.checkpoints.size();

  TrialSummary s;
  s.m1.resize(static_cast<Eigen::Index>(P), n);
  s.c2.resize(static_cast<Eigen::Index>(P), n);
  s.lag.assign(P, std::vector<double>(C));
  s.u1.assign(P * P, std::vector<double>(C));
  s.u2 = s.u1;
  s.vu_all = s.u1;
  s.vu_diag = s.u1;

  for (std::size_t a = 0; a < P; ++a) {
    const auto rows = traj.middleRows(static_cast<Eigen::Index>(off[a]), static_cast<Eigen::Index>(mc.sizes[a]));
    const double na = static_cast<double>(mc.sizes[a]);
    for (Eigen::Index i = 0; i < n; ++i) {
      double m = 0.0;
      for (Eigen::Index r = 0; r < rows.rows(); ++r) m += (rows(r, i) - m) / static_cast<double>(r + 1);
      s.m1(static_cast<Eigen::Index>(a), i) = m;
      s.c2(static_cast<Eigen::Index>(a), i) = (rows.col(i).array() - m).square().sum() / na;
    }
    for (std::size_t c = 0; c < C; ++c) {
      const auto ci = static_cast<Eigen::Index>(mc.checkpoints[c]);
      s.lag[a][c] = rows.col(ci).dot(rows.col(last)) / na;
    }
  }

  const auto N = traj.rows();
  Eigen::VectorXd rates(N);
  for (std::size_t c = 0; c < C; ++c) {
    const auto ci = static_cast<Eigen::Index>(mc.checkpoints[c]);
    for (std::size_t b = 0; b < P; ++b) {
      for (std::size_t j = off[b]; j < off[b + 1]; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        rates(jj) = eval_sigmoid(spec.populations[b].sigmoid, traj(jj, ci));
      }
    }
    for (std::size_t b = 0; b < P; ++b) {
      const auto cb = static_cast<Eigen::Index>(off[b]);
      const auto nb = static_cast<Eigen::Index>(mc.sizes[b]);
      const Eigen::VectorXd u = W.middleCols(cb, nb) * rates.segment(cb, nb);
      for (std::size_t a = 0; a < P; ++a) {
        const auto ca = static_cast<Eigen::Index>(off[a]);
        const auto na_i = static_cast<Eigen::Index>(mc.sizes[a]);
        const double na = static_cast<double>(mc.sizes[a]);
        const auto ua = u.segment(ca, na_i);
        const auto va = traj.col(ci).segment(ca, na_i);
        const std::size_t ab = a * P + b;
        s.u1[ab][c] = ua.sum() / na;
        s.u2[ab][c] = ua.squaredNorm() / na;
        s.vu_all[ab][c] = va.sum() * ua.sum() / (na * na);
        s.vu_diag[ab][c] = va.dot(ua) / na;
      }
    }
  }
  return s;
}

EmpiricalMoments moments_from_summaries(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc,
                                        const std::vector<TrialSummary>& trials) {
  if (trials.size() < 2) throw std::invalid_argument("moments: at least two trials are required");
  const std::size_t P = spec.size();
  const std::size_t n = grid.size();
  const std::size_t C = mc.checkpoints.size();
  const std::size_t T = trials.size();

  EmpiricalMoments m;
  m.grid = grid;
  m.trials = static_cast<int>(T);
  m.sizes = mc.sizes;
  m.checkpoints = mc.checkpoints;
  m.mean.assign(P, std::vector<Estimate>(n));
  m.variance = m.mean;
  m.lag_cov.assign(P, std::vector<Estimate>(C));
  m.u_mean.assign(P * P, std::vector<Estimate>(C));
  m.u_var = m.u_mean;
  m.corr_vu.assign(P * P, std::vector<double>(C, 0.0));

  std::vector<double> x(T);
  auto across = [&](auto&& get) {
    for (std::size_t k = 0; k < T; ++k) x[k] = get(trials[k]);
    return estimate(x);
  };

  for (std::size_t a = 0; a < P; ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      m.mean[a][i] = across([&](const TrialSummary& s) { return s.m1(ai, ii); });
      const double mu = m.mean[a][i].value;
      m.variance[a][i] = across([&](const TrialSummary& s) {
        const double d = s.m1(ai, ii) - mu;
        return s.c2(ai, ii) + d * d;
      });
    }
    const double mu_end = m.mean[a][n - 1].value;
    for (std::size_t c = 0; c < C; ++c) {
      const double mu_c = m.mean[a][mc.checkpoints[c]].value;
      m.lag_cov[a][c] = across([&](const TrialSummary& s) { return s.lag[a][c] - mu_c * mu_end; });
    }
  }

  double corr_sum = 0.0;
  std::size_t corr_count = 0;
  for (std::size_t a = 0; a < P; ++a) {
    const double na = static_cast<double>(mc.sizes[a]);
    for (std::size_t b = 0; b < P; ++b) {
      const std::size_t ab = a * P + b;
      for (std::size_t c = 0; c < C; ++c) {
        m.u_mean[ab][c] = across([&](const TrialSummary& s) { return s.u1[ab][c]; });
        const double um = m.u_mean[ab][c].value;
        m.u_var[ab][c] = across([&](const TrialSummary& s) { return s.u2[ab][c] - um * um; });
        if (mc.sizes[a] < 2) continue;
        // mean of V_i U_k over ordered pairs i != k
        const auto off = across([&](const TrialSummary& s) {
          return (na * na * s.vu_all[ab][c] - na * s.vu_diag[ab][c]) / (na * (na - 1.0));
        });
        const std::size_t ic = mc.checkpoints[c];
        const double cov = off.value - m.mean[a][ic].value * um;
        const double denom = std::sqrt(m.variance[a][ic].value * m.u_var[ab][c].value);
        m.corr_vu[ab][c] = denom > 0.0 ? cov / denom : 0.0;
        corr_sum += std::abs(m.corr_vu[ab][c]);
        ++corr_count;
      }
    }
  }
  m.corr_vu_summary = corr_count ? corr_sum / static_cast<double>(corr_count) : 0.0;
  return m;
}

EmpiricalMoments empirical_moments(const NetworkSpec& spec, const McEnsemble& e) {
  std::vector<TrialSummary> s(e.trajectories.size());
  parallel_for(0, s.size(), e.config.threads, [&](std::size_t k) {
    const auto& W = e.weights[e.config.resample_weights_per_trial ? k : 0];
    s[k] = summarize_trial(spec, e.config, W, e.trajectories[k]);
  });
  return moments_from_summaries(spec, e.grid, e.config, s);
}

EmpiricalMoments run_monte_carlo(const NetworkSpec& spec, const TimeGrid& grid, const McConfig& mc_in) {
  require_valid(spec);
  validate_mc_config(mc_in, spec);
  const McConfig mc = with_checkpoints(mc_in, grid);
  const auto T = static_cast<std::size_t>(mc.trials);
  Eigen::MatrixXd frozen;
  if (!mc.resample_weights_per_trial) frozen = trial_weights(spec, mc, 0);
  std::vector<TrialSummary> s(T);
  parallel_for(0, T, mc.threads, [&](std::size_t k) {
    const auto trial = static_cast<std::uint32_t>(k);
    const Eigen::MatrixXd W = mc.resample_weights_per_trial ? trial_weights(spec, mc, trial) : frozen;
    s[k] = summarize_trial(spec, mc, W, simulate_network(spec, W, mc, grid, trial));
  });
  return moments_from_summaries(spec, grid, mc, s);
}

McComparison compare_mc_mf(const NetworkSpec& spec, const EmpiricalMoments& m, const MomentState& state,
                           int quadrature_order) {
  if (!(m.grid == state.grid)) throw std::invalid_argument("compare_mc_mf: Monte Carlo and mean-field grids differ");
  const std::size_t P = spec.size();
  if (state.populations() != P || m.mean.size() != P) {
    throw std::invalid_argument("compare_mc_mf: population count mismatch");
  }
  const GhRule rule = gh_rule(quadrature_order);
  const std::size_t C = m.checkpoints.size();
  const auto& jbar = spec.connectivity.j_bar;
  const auto& sigma = spec.connectivity.sigma;

  McComparison r;
  r.checkpoints = m.checkpoints;
  r.z_mean.assign(P, std::vector<double>(C));
  r.z_var = r.z_mean;
  r.z_u_mean.assign(P * P, std::vector<double>(C));
  r.z_u_var = r.z_u_mean;
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t i = m.checkpoints[c];
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t a = 0; a < P; ++a) {
      const auto ai = static_cast<Eigen::Index>(a);
      r.z_mean[a][c] = zscore(m.mean[a][i].value, m.mean[a][i].se, state.mu(ai, ii));
      r.z_var[a][c] = zscore(m.variance[a][i].value, m.variance[a][i].se, state.variance(a, i));
      r.max_z_mean = std::max(r.max_z_mean, r.z_mean[a][c]);
      r.max_z_var = std::max(r.max_z_var, r.z_var[a][c]);
    }
    for (std::size_t b = 0; b < P; ++b) {
      const auto bi = static_cast<Eigen::Index>(b);
      const auto& S = spec.populations[b].sigmoid;
      const double mu = state.mu(bi, ii);
      const double v = std::max(0.0, state.variance(b, i));
      const double es = gauss_expect(S, mu, v, rule);
      const double es2 = delta_kernel(S, {mu, mu, v, v, v, false}, rule);
      for (std::size_t a = 0; a < P; ++a) {
        const auto ai = static_cast<Eigen::Index>(a);
        const std::size_t ab = a * P + b;
        const double s2 = sigma(ai, bi) * sigma(ai, bi);
        r.z_u_mean[ab][c] = zscore(m.u_mean[ab][c].value, m.u_mean[ab][c].se, jbar(ai, bi) * es);
        r.z_u_var[ab][c] = zscore(m.u_var[ab][c].value, m.u_var[ab][c].se, s2 * es2);
        r.max_z_u_mean = std::max(r.max_z_u_mean, r.z_u_mean[ab][c]);
        r.max_z_u_var = std::max(r.max_z_u_var, r.z_u_var[ab][c]);
      }
    }
  }
  r.max_z = std::max({r.max_z_mean, r.max_z_var, r.max_z_u_mean, r.max_z_u_var});
  return r;
}

}  // namespace mfnet

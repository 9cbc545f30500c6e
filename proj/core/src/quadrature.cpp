#include "mfnet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mfnet {

namespace {

// Orthonormal probabilists' Hermite polynomials: returns p_n(x) and p_{n-1}(x)
// together with sum_{k<n} p_k(x)^2.
struct HermiteEval {
  double pn = 0.0;
  double pn1 = 0.0;
  double christoffel = 0.0;
};

HermiteEval hermite_orthonormal(int n, double x) noexcept {
  double prev = 0.0;
  double cur = 1.0;  // p_0
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return {cur, prev, sum};
}

// Pairs (x_i, -x_i) share a weight; odd orders carry a node at 0. Pairs
// before `first` are skipped.
template <class F>
double symmetric_sum(const GhRule& rule, F&& f_pair, double f_mid, std::size_t first = 0) {
  const std::size_t n = rule.nodes.size();
  double acc = 0.0;
  for (std::size_t i = first; i < n / 2; ++i) acc += rule.weights[i] * f_pair(rule.nodes[i]);
  if (n % 2 == 1) acc += rule.weights[n / 2] * f_mid;
  return acc;
}

}  // namespace

GhRule gh_rule(int order) {
  if (order < 1 || order > kMaxGhOrder) {
    throw std::invalid_argument("gh_rule: order must lie in [1, " + std::to_string(kMaxGhOrder) + "], got " +
                                std::to_string(order));
  }
  GhRule rule;
  rule.order = order;
  const auto n = static_cast<std::size_t>(order);
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (order == 1) {
    rule.weights[0] = 1.0;
    return rule;
  }

  // Jacobi matrix of the probabilists' Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("gh_rule: eigenvalue solver failed");

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = eig.eigenvalues()(static_cast<Eigen::Index>(i));
  std::sort(x.begin(), x.end());

  // Newton polish on the positive half, then mirror so the rule is exactly symmetric.
  const double sqrt_n = std::sqrt(static_cast<double>(order));
  for (std::size_t i = n - n / 2; i < n; ++i) {
    double xi = x[i];
    for (int it = 0; it < 4; ++it) {
      const auto h = hermite_orthonormal(order, xi);
      const double deriv = sqrt_n * h.pn1;  // p_n' = sqrt(n) p_{n-1}
      if (deriv == 0.0) break;
      xi -= h.pn / deriv;
    }
    x[i] = xi;
    x[n - 1 - i] = -xi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t mirror = std::max(i, n - 1 - i);  // compute once per pair
    rule.nodes[i] = x[i];
    rule.weights[i] = 1.0 / hermite_orthonormal(order, x[mirror]).christoffel;
    total += rule.weights[i];
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

BivariateGaussianStats clamp_cauchy_schwarz(BivariateGaussianStats s) noexcept {
  s.v_u = std::max(s.v_u, 0.0);
  s.v_v = std::max(s.v_v, 0.0);
  const double bound = std::sqrt(s.v_u * s.v_v);
  if (std::abs(s.c_uv) > bound) {
    s.c_uv = std::copysign(bound, s.c_uv);
    s.clamped = true;
  }
  return s;
}

namespace {

// Concrete sigmoid functors so the quadrature loops avoid a variant dispatch per node.
struct LogisticFn {
  Logistic p;
  double operator()(double x) const noexcept { return p.s_max / (1.0 + std::exp(-(x - p.v_t) / p.v_s)); }
};
struct ErfFn {
  ErfForm p;
  double operator()(double x) const noexcept { return normal_cdf(p.g * x + p.gamma); }
};
struct TanhFn {
  Tanh p;
  double operator()(double x) const noexcept { return fast_tanh(p.g * x); }
};
struct SqrtFn {
  SqrtClassI p;
  double operator()(double x) const noexcept { return x > p.p_star ? p.c * std::sqrt(x - p.p_star) : 0.0; }
};

template <class Visitor>
decltype(auto) with_sigmoid_fn(const Sigmoid& s, Visitor&& vis) {
  switch (s.index()) {
    case 0: return vis(LogisticFn{std::get<Logistic>(s)});
    case 1: return vis(ErfFn{std::get<ErfForm>(s)});
    case 2: return vis(TanhFn{std::get<Tanh>(s)});
    default: return vis(SqrtFn{std::get<SqrtClassI>(s)});
  }
}

template <class F>
double expect_impl(const F& S, double mu, double v, const GhRule& rule) {
  if (!(v > 0.0)) return S(mu);
  const double sd = std::sqrt(v);
  return symmetric_sum(
      rule, [&](double x) { return S(mu + sd * x) + S(mu - sd * x); }, S(mu));
}

// Outer pairs whose weight is below this carry less than 1e-16 of the Gaussian
// mass in total for every supported order; the double quadrature drops them.
constexpr double kNegligibleWeight = 1e-17;

std::size_t first_significant(const GhRule& rule) noexcept {
  std::size_t i = 0;
  while (i < rule.nodes.size() / 2 && rule.weights[i] < kNegligibleWeight) ++i;
  return i;
}

template <class F>
double delta_impl(const F& S, const BivariateGaussianStats& stats, const GhRule& rule) {
  const bool u_det = stats.v_u <= kDegenerateVariance;
  const bool v_det = stats.v_v <= kDegenerateVariance;
  if (u_det && v_det) return S(stats.mu_u) * S(stats.mu_v);
  if (v_det) return S(stats.mu_v) * expect_impl(S, stats.mu_u, stats.v_u, rule);
  if (u_det) return S(stats.mu_u) * expect_impl(S, stats.mu_v, stats.v_v, rule);

  // X_v = d y + mu_v,  X_u | y = a x + b y + mu_u
  const double d = std::sqrt(stats.v_v);
  const double a = std::sqrt(std::max(stats.v_u * stats.v_v - stats.c_uv * stats.c_uv, 0.0)) / d;
  const double b = stats.c_uv / d;
  const std::size_t first = first_significant(rule);

  auto inner = [&](double y) {
    const double m = b * y + stats.mu_u;
    if (a == 0.0) return S(m);
    return symmetric_sum(
        rule, [&](double x) { return S(m + a * x) + S(m - a * x); }, S(m), first);
  };
  return symmetric_sum(
      rule, [&](double y) { return S(stats.mu_v + d * y) * inner(y) + S(stats.mu_v - d * y) * inner(-y); },
      S(stats.mu_v) * inner(0.0), first);
}

}  // namespace

double gauss_expect(const Sigmoid& s, double mu, double v, const GhRule& rule) {
  return with_sigmoid_fn(s, [&](const auto& S) { return expect_impl(S, mu, v, rule); });
}

double delta_kernel(const Sigmoid& s, BivariateGaussianStats stats, const GhRule& rule) {
  stats = clamp_cauchy_schwarz(stats);
  return with_sigmoid_fn(s, [&](const auto& S) { return delta_impl(S, stats, rule); });
}

double erf_mean_closed(double g, double gamma, double mu, double v) noexcept {
  return normal_cdf((g * mu + gamma) / std::sqrt(1.0 + g * g * std::max(v, 0.0)));
}

double erf_delta_closed(double g, double gamma, BivariateGaussianStats stats, const GhRule& rule) {
  stats = clamp_cauchy_schwarz(stats);
  const bool u_det = stats.v_u <= kDegenerateVariance;
  const bool v_det = stats.v_v <= kDegenerateVariance;
  const auto S = [g, gamma](double x) { return normal_cdf(g * x + gamma); };
  if (u_det && v_det) return S(stats.mu_u) * S(stats.mu_v);
  if (v_det) return S(stats.mu_v) * erf_mean_closed(g, gamma, stats.mu_u, stats.v_u);
  if (u_det) return S(stats.mu_u) * erf_mean_closed(g, gamma, stats.mu_v, stats.v_v);

  const double d = std::sqrt(stats.v_v);
  const double resid = std::max(stats.v_u * stats.v_v - stats.c_uv * stats.c_uv, 0.0);
  const double denom = std::sqrt(stats.v_v + g * g * resid);
  const double shift = d * (g * stats.mu_u + gamma);
  auto term = [&](double y) {
    return S(d * y + stats.mu_v) * normal_cdf((g * stats.c_uv * y + shift) / denom);
  };
  return symmetric_sum(
      rule, [&](double y) { return term(y) + term(-y); }, term(0.0));
}

double erf_delta_printed(double g, double gamma, BivariateGaussianStats stats, const GhRule& rule) {
  stats = clamp_cauchy_schwarz(stats);
  const auto S = [g, gamma](double x) { return normal_cdf(g * x + gamma); };
  const double d = std::sqrt(stats.v_v);
  const double denom = stats.v_v + g * g * (stats.v_u * stats.v_v - stats.c_uv * stats.c_uv);
  if (denom <= 0.0) return S(stats.mu_u) * S(stats.mu_v);
  auto term = [&](double y) { return S(d * y + stats.mu_v) * S((stats.c_uv * y + stats.mu_u * d) / denom); };
  return symmetric_sum(
      rule, [&](double y) { return term(y) + term(-y); }, term(0.0));
}

}  // namespace mfnet

#pragma once

// Gaussian expectations of sigmoids: probabilists' Gauss-Hermite rules, the
// single integral E[S(sqrt(v) X + mu)], the bivariate kernel
// E[S(X_u) S(X_v)] and the closed forms available for ErfForm sigmoids.

#include <cstddef>
#include <vector>

#include "mfnet/model.hpp"

namespace mfnet {

/// Quadrature against the standard Gaussian measure: sum_i w_i f(x_i) ~ E[f(X)].
/// Nodes ascend and are exactly symmetric about 0; weights sum to 1.
struct GhRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGhOrder = 200;
inline constexpr int kDefaultGhOrder = 40;

/// Golub-Welsch nodes polished by Newton on the orthonormal Hermite
/// recurrence; weights from the Christoffel function. Throws
/// std::invalid_argument unless 1 <= order <= kMaxGhOrder.
GhRule gh_rule(int order);

/// Moments of a jointly Gaussian pair (X_u, X_v).
struct BivariateGaussianStats {
  double mu_u = 0.0;
  double mu_v = 0.0;
  double v_u = 0.0;
  double v_v = 0.0;
  double c_uv = 0.0;
  bool clamped = false;  ///< c_uv was pulled back onto the Cauchy-Schwarz bound
};

/// Clamps variances at 0 and |c_uv| at sqrt(v_u v_v), setting `clamped` when
/// the covariance moved.
BivariateGaussianStats clamp_cauchy_schwarz(BivariateGaussianStats s) noexcept;

/// Variances at or below this are treated as deterministic coordinates.
inline constexpr double kDegenerateVariance = 1e-12;

/// E[S(sqrt(v) X + mu)], X ~ N(0,1); exactly S(mu) when v <= 0.
double gauss_expect(const Sigmoid& s, double mu, double v, const GhRule& rule);

/// E[S(X_u) S(X_v)] by the double quadrature conditioning X_u on X_v.
double delta_kernel(const Sigmoid& s, BivariateGaussianStats stats, const GhRule& rule);

/// E[Phi(g X + gamma)] for X ~ N(mu, v): Phi((g mu + gamma) / sqrt(1 + g^2 v)).
double erf_mean_closed(double g, double gamma, double mu, double v) noexcept;

/// E[S(X_u) S(X_v)] for S(x) = Phi(g x + gamma), reduced to a one-dimensional
/// integral over the X_v coordinate by integrating X_u's conditional law in
/// closed form.
double erf_delta_closed(double g, double gamma, BivariateGaussianStats stats, const GhRule& rule);

/// The one-dimensional reduction with the historically printed argument
///   S((c y + mu_u sqrt(v_v)) / (v_v + g^2 (v_u v_v - c^2))),
/// kept only to document that it disagrees with the double quadrature.
double erf_delta_printed(double g, double gamma, BivariateGaussianStats stats, const GhRule& rule);

}  // namespace mfnet

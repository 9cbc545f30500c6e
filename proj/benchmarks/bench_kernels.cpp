#include <benchmark/benchmark.h>

#include "mfnet/meanfield.hpp"
#include "mfnet/quadrature.hpp"

using namespace mfnet;

namespace {

NetworkSpec bench_spec(Sigmoid s) {
  NetworkSpec spec;
  spec.populations = {{0.25, 0.0, s, ConstantInput{0.0}}};
  spec.connectivity.j_bar = Eigen::MatrixXd::Constant(1, 1, 1.0);
  spec.connectivity.sigma = Eigen::MatrixXd::Constant(1, 1, 1.0);
  spec.initial_mean = {0.1};
  spec.initial_variance = {0.01};
  return spec;
}

void BM_GaussExpect(benchmark::State& st) {
  const auto rule = gh_rule(static_cast<int>(st.range(0)));
  double mu = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(gauss_expect(Tanh{2.0}, mu, 0.7, rule));
    mu += 1e-9;
  }
}
BENCHMARK(BM_GaussExpect)->Arg(20)->Arg(40)->Arg(80);

void BM_DeltaKernel(benchmark::State& st) {
  const auto rule = gh_rule(static_cast<int>(st.range(0)));
  BivariateGaussianStats s{0.2, -0.1, 0.8, 0.6, 0.3, false};
  for (auto _ : st) {
    benchmark::DoNotOptimize(delta_kernel(Tanh{2.0}, s, rule));
    s.c_uv += 1e-12;
  }
}
BENCHMARK(BM_DeltaKernel)->Arg(20)->Arg(40)->Arg(80);

void BM_ErfDeltaClosed(benchmark::State& st) {
  const auto rule = gh_rule(40);
  const BivariateGaussianStats s{0.2, -0.1, 0.8, 0.6, 0.3, false};
  for (auto _ : st) benchmark::DoNotOptimize(erf_delta_closed(1.5, 0.2, s, rule));
}
BENCHMARK(BM_ErfDeltaClosed);

void BM_ApplyF(benchmark::State& st) {
  const auto spec = bench_spec(Tanh{2.0});
  const TimeGrid grid(0.0, 10.0, 10.0 / static_cast<double>(st.range(0) - 1));
  const auto rule = gh_rule(40);
  const auto x = apply_F(spec, initial_state(spec, grid), rule);
  for (auto _ : st) benchmark::DoNotOptimize(apply_F(spec, x, rule));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ApplyF)->Arg(101)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

}  // namespace
BENCHMARK_MAIN();

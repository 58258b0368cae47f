#include "dil/coherent.hpp"
#include "dil/dilation.hpp"
#include "dil/gh.hpp"
#include "dil/length_cc.hpp"
#include "dil/random.hpp"
#include "dil/spaces.hpp"

#include <benchmark/benchmark.h>

using namespace dil;

static void BM_ApproxIdentities(benchmark::State& st) {
  const auto S = construct_space(st.range(0) ? "sphere" : "heisenberg");
  Rng rng(1);
  const Vec x = uniform_box(rng, Vec::Zero(S->dim()), 0.3);
  const Vec u = uniform_box(rng, x, 0.3), v = uniform_box(rng, x, 0.3), w = uniform_box(rng, x, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(approx_identity_residuals(*S, x, 0.4, u, v, w));
}
BENCHMARK(BM_ApproxIdentities)->Arg(0)->Arg(1);

static void BM_LimitSum(benchmark::State& st) {
  const auto S = construct_space("heisenberg");
  const Vec x = Vec::Zero(3), u = Vec::Constant(3, 0.2), v = Vec::Constant(3, -0.1);
  const auto grid = default_eps_grid();
  for (auto _ : st) benchmark::DoNotOptimize(limit_sum(*S, x, u, v, grid));
}
BENCHMARK(BM_LimitSum);

static void BM_GhExact(benchmark::State& st) {
  Rng rng(2);
  const int n = static_cast<int>(st.range(0));
  std::vector<Vec> a, b;
  for (int i = 0; i < n; ++i) {
    a.push_back(uniform_box(rng, Vec::Zero(2), 1));
    b.push_back(uniform_box(rng, Vec::Zero(2), 1));
  }
  const auto d = [](const Vec& p, const Vec& q) { return (p - q).norm(); };
  const auto A = FiniteMetricSpace::from_points(a, d), B = FiniteMetricSpace::from_points(b, d);
  for (auto _ : st) benchmark::DoNotOptimize(gh_exact_small(A, B, 16));
}
BENCHMARK(BM_GhExact)->DenseRange(2, 4);

static void BM_ChowConnect(benchmark::State& st) {
  const CoherentProjection P(CarnotGroup::heisenberg());
  const Vec z = (Vec(3) << 0.1, -0.2, 0.05).finished();
  for (auto _ : st) benchmark::DoNotOptimize(chow_connect(P, Vec::Zero(3), z, 1.0));
}
BENCHMARK(BM_ChowConnect);

static void BM_CcHorizontal(benchmark::State& st) {
  const auto G = CarnotGroup::heisenberg();
  CcOptions o;
  o.cells = {8};
  o.multistarts = 1;
  const Vec y = (Vec(3) << 1, 0, 0).finished();
  for (auto _ : st) benchmark::DoNotOptimize(cc_distance(G, Vec::Zero(3), y, o));
}
BENCHMARK(BM_CcHorizontal)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

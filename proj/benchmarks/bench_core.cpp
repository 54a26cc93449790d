#include "tuner/gp.hpp"
#include "tuner/kernel_selection.hpp"
#include "tuner/quad_env.hpp"
#include "tuner/sampling.hpp"

#include <benchmark/benchmark.h>

using namespace tuner;

namespace {

Matrix random_points(int n, int dims, std::uint64_t seed) {
  RngEngine eng(RngStream{seed, 0});
  Matrix m(n, dims);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dims; ++d) m(i, d) = eng.uniform01();
  return m;
}

Dataset random_dataset(int n, int dims, std::uint64_t seed) {
  RngEngine eng(RngStream{seed, 1});
  Matrix x = random_points(n, dims, seed);
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = 50.0 * (eng.uniform01() - 0.5);
  return Dataset(std::move(x), std::move(y));
}

void bm_elementary_symmetric(benchmark::State& state) {
  const int dims = static_cast<int>(state.range(0));
  std::vector<double> z(dims);
  RngEngine eng(RngStream{1, 0});
  for (auto& v : z) v = eng.uniform01();
  for (auto _ : state) benchmark::DoNotOptimize(elementary_symmetric(z, dims));
}
BENCHMARK(bm_elementary_symmetric)->Arg(5)->Arg(9);

void bm_additive_kernel_eval(benchmark::State& state) {
  const int max_order = static_cast<int>(state.range(0));
  std::vector<int> orders;
  for (int n = 1; n <= max_order; ++n) orders.push_back(n);
  const KernelSpec spec = KernelSpec::make(9, orders, BaseKernelParams::constant(9));
  const Matrix pts = random_points(2, 9, 2);
  const Vector a = pts.row(0), b = pts.row(1);
  for (auto _ : state) benchmark::DoNotOptimize(additive_kernel_eval(a, b, spec));
}
BENCHMARK(bm_additive_kernel_eval)->Arg(1)->Arg(4)->Arg(9);

void bm_kernel_matrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec = KernelSpec::make(9, {1, 2, 3, 4}, BaseKernelParams::constant(9));
  const Matrix pts = random_points(n, 9, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(pts, spec));
}
BENCHMARK(bm_kernel_matrix)->Arg(36)->Arg(150);

void bm_gp_fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec = KernelSpec::make(9, {1, 2, 3, 4}, BaseKernelParams::constant(9));
  const Dataset data = random_dataset(n, 9, 4);
  for (auto _ : state) benchmark::DoNotOptimize(GpModel::fit(data, spec, 1e-2));
}
BENCHMARK(bm_gp_fit)->Arg(36)->Arg(150);

void bm_gp_predict_batch(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const KernelSpec spec = KernelSpec::make(9, {1, 2, 3, 4}, BaseKernelParams::constant(9));
  const GpModel model = GpModel::fit(random_dataset(100, 9, 5), spec, 1e-2);
  const Matrix queries = random_points(m, 9, 6);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_batch(queries, 1));
}
BENCHMARK(bm_gp_predict_batch)->Arg(1000)->Arg(7000);

void bm_nystrom_cree(benchmark::State& state) {
  const Dataset data = random_dataset(36, 9, 7);
  const KernelSpec spec = KernelSpec::single_order(9, 2, BaseKernelParams::constant(9));
  NystromConfig cfg;
  cfg.trials = 1;
  std::uint64_t trial = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(nystrom_cree(data, spec, cfg, RngStream{8, trial++}));
}
BENCHMARK(bm_nystrom_cree);

void bm_latin_hypercube(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(latin_hypercube(36, 9, RngStream{seed++, 0}));
}
BENCHMARK(bm_latin_hypercube);

void bm_episode(benchmark::State& state) {
  const quad::Environment env{};
  const Vector gains = env.bounds.normalize(quad::PidGains{
      {0.6, 0.02, 0.45}, {4.0, 0.2, 2.5}, {4.0, 0.05, 0.06}});
  for (auto _ : state) benchmark::DoNotOptimize(env.objective(gains));
}
BENCHMARK(bm_episode);

}  // namespace

BENCHMARK_MAIN();

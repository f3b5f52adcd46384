// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "mgtune/kernels.hpp"
#include "mgtune/runner.hpp"

namespace {

using namespace mgtune;

std::vector<PiGains> sweep_gains(int n) {
  const auto kp = axis_values(0.0, 0.03, n, 0.005);
  const auto ki = axis_values(0.0, 300.0, n, 10.0);
  std::vector<PiGains> g;
  for (double p : kp)
    for (double i : ki) g.push_back({p, i});
  return g;
}

void BM_SweepSerial(benchmark::State& state) {
  const EnvConfig env;
  const auto gains = sweep_gains(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_performance_serial(env, gains));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(gains.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const EnvConfig env;
  const auto gains = sweep_gains(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_performance(env, gains));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(gains.size()));
}

GpModel random_gp(int n_obs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n_obs, 2);
  Eigen::VectorXd y(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y(i) = -u(rng);
  }
  return GpModel::fit(x, y, KernelParams{{0.05, 0.05}, 0.5, 0.005}, -0.5);
}

Eigen::MatrixXd grid_points(int side) {
  Eigen::MatrixXd g(side * side, 2);
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) g.row(a * side + b) << a / (side - 1.0), b / (side - 1.0);
  return g;
}

void BM_PosteriorSerial(benchmark::State& state) {
  const GpModel gp = random_gp(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd g = grid_points(100);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_batch_serial(gp, g));
}

void BM_PosteriorParallel(benchmark::State& state) {
  const GpModel gp = random_gp(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd g = grid_points(100);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_batch(gp, g));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PosteriorSerial)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PosteriorParallel)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

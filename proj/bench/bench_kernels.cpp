// Serial reference path vs OpenMP path for the hot kernels.
#include <random>

#include <benchmark/benchmark.h>

#include "vsheet/fixed_point.hpp"
#include "vsheet/muskat.hpp"
#include "vsheet/random.hpp"
#include "vsheet/singular_ops.hpp"
#include "vsheet/time_evolution.hpp"

using namespace vsheet;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(max_threads()));
}

void BM_tj_quadrature(benchmark::State& state) {
  const auto g = make_grid(static_cast<int>(state.range(1)), 1.0);
  std::mt19937_64 rng(7);
  const auto yx = random_band_field(g, 8, 0.2, rng);
  const auto u = random_band_field(g, 8, 1.0, rng, true);
  OperatorConfig cfg;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(tj_apply(yx, u, 3, Backend::Quadrature, cfg));
  label(state);
}
BENCHMARK(BM_tj_quadrature)->ArgsProduct({{0, 1}, {128, 256}})->Unit(benchmark::kMillisecond);

struct Trajectory {
  SpaceTimeField y_x;
  SpaceTimeField omega;
  PhysParams params;
};

Trajectory trajectory(int n_modes, int steps) {
  PhysParams p;
  p.atwood = 0.3;
  p.gravity = -1.0;
  p.alpha = 0.05;
  const auto g = make_grid(n_modes, 4.0);
  std::mt19937_64 rng(8);
  const auto y0 = random_band_field(g, 6, 0.01, rng);
  auto [y, w] = linear_solution(y0, p, TimeGrid::graded(20.0, steps, 0.6));
  return {std::move(y), std::move(w), p};
}

void BM_evaluate_forcing(benchmark::State& state) {
  const auto t = trajectory(64, 100);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        evaluate_forcing(t.y_x, t.omega, t.params, NonlinearBackend::ClosedForm, SeriesOptions{}, exec_of(state)));
  label(state);
}
BENCHMARK(BM_evaluate_forcing)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond);

void BM_assemble_apos(benchmark::State& state) {
  const auto t = trajectory(static_cast<int>(state.range(1)), 400);
  const auto f = evaluate_forcing(t.y_x, t.omega, t.params, NonlinearBackend::ClosedForm, SeriesOptions{}, Exec::Serial);
  AssemblyOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_apos(t.y_x[0], f.F, f.G1, f.G2, t.params, opt));
  label(state);
}
BENCHMARK(BM_assemble_apos)->ArgsProduct({{0, 1}, {64, 128}})->Unit(benchmark::kMillisecond);

void BM_muskat_nonlinearity(benchmark::State& state) {
  const auto g = make_grid(static_cast<int>(state.range(1)), 1.0);
  std::mt19937_64 rng(9);
  const auto fx = random_band_field(g, 6, 0.1, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(muskat_nonlinearity(fx, 2.0, NonlinearBackend::ClosedForm, exec_of(state)));
  label(state);
}
BENCHMARK(BM_muskat_nonlinearity)->ArgsProduct({{0, 1}, {128, 256}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>

#include "lfk/kernel.hpp"
#include "lfk/operators.hpp"
#include "lfk/solver.hpp"

namespace {

lfk::Field gaussian_field(int dim, std::size_t n, double length) {
    lfk::Grid grid(dim, n, length);
    lfk::Field f(grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double x0 = grid.coordinate(dim == 1 ? i : i / n);
        double x1 = dim == 1 ? 0.0 : grid.coordinate(i % n);
        f.values[i] = std::exp(-(x0 * x0 + x1 * x1));
    }
    return f;
}

void BM_fractional_laplacian_1d(benchmark::State& state) {
    lfk::Field f = gaussian_field(1, static_cast<std::size_t>(state.range(0)), 40.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lfk::fractional_laplacian(f, 1.0));
}
BENCHMARK(BM_fractional_laplacian_1d)->Arg(1024)->Arg(8192)->Arg(65536);

void BM_fractional_laplacian_2d(benchmark::State& state) {
    lfk::Field f = gaussian_field(2, static_cast<std::size_t>(state.range(0)), 40.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lfk::fractional_laplacian(f, 1.0));
}
BENCHMARK(BM_fractional_laplacian_2d)->Arg(128)->Arg(512);

void BM_etd_step(benchmark::State& state) {
    lfk::SolverConfig cfg;
    cfg.alpha = 1.0;
    cfg.p = 2.0;
    lfk::StepState s(gaussian_field(1, static_cast<std::size_t>(state.range(0)), 40.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(lfk::etd_step(s, cfg, 1e-3));
}
BENCHMARK(BM_etd_step)->Arg(1024)->Arg(8192)->Arg(65536);

void BM_kernel_value_quadrature(benchmark::State& state) {
    lfk::KernelSpec spec{state.range(0) / 10.0, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            lfk::kernel_value_quadrature(spec, {1.0, 0.0}, 1.0));
}
BENCHMARK(BM_kernel_value_quadrature)->Arg(5)->Arg(15);

void BM_kernel_grid(benchmark::State& state) {
    lfk::KernelSpec spec{1.5, 1};
    lfk::Grid grid(1, static_cast<std::size_t>(state.range(0)), 40.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lfk::kernel_grid(spec, grid, 1.0));
}
BENCHMARK(BM_kernel_grid)->Arg(1024)->Arg(8192);

}  // namespace

BENCHMARK_MAIN();

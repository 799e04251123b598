#include "jjgz/bvp.hpp"
#include "jjgz/waveform.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_SolveAll(benchmark::State& state)
{
    const jjgz::Waveform w = jjgz::default_step(1.0);
    const double step = 1.0 / static_cast<double>(state.range(0));
    const jjgz::Grid grid = jjgz::make_grid(w, 1.0, step);
    jjgz::BvpOptions opt;
    opt.richardson = state.range(1) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(jjgz::solve_all(w, grid, 1.0, opt));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n_steps));
}
BENCHMARK(BM_SolveAll)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SingleLinearSolve(benchmark::State& state)
{
    const jjgz::Waveform w = jjgz::default_step(1.0);
    const jjgz::Grid grid = jjgz::make_grid(w, 1.0, 1e-3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            jjgz::solve_linear_bvp(w, grid, 1.0, jjgz::DampingSign::negative, 0.0, 1.0, 0.0));
}
BENCHMARK(BM_SingleLinearSolve)->Unit(benchmark::kMillisecond);

} // namespace

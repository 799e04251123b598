#include "jjgz/bvp.hpp"
#include "jjgz/coeffs.hpp"
#include "jjgz/waveform.hpp"

#include <benchmark/benchmark.h>

namespace {

struct Fixture {
    jjgz::DimensionlessParams p;
    jjgz::BvpSolution sol;

    explicit Fixture(double theta)
    {
        p.q = 500.0;
        p.theta = theta;
        const jjgz::Waveform w = jjgz::default_step(p.beta_c);
        sol = jjgz::solve_all(w, jjgz::make_grid(w, p.beta_c), p.beta_c);
    }
};

// Argument is theta in hundredths.
void BM_NoiseQuadrature(benchmark::State& state)
{
    const Fixture f(0.01 * static_cast<double>(state.range(0)));
    jjgz::NoiseCoeffs c;
    for (auto _ : state)
        benchmark::DoNotOptimize(c = jjgz::compute_noise_quadrature(f.sol, f.p));
    state.counters["panels"] = static_cast<double>(c.panels);
}
BENCHMARK(BM_NoiseQuadrature)->Arg(0)->Arg(100)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_NoiseVegas(benchmark::State& state)
{
    const Fixture f(1.0);
    jjgz::McConfig cfg;
    cfg.sample_budget = static_cast<std::size_t>(state.range(0));
    cfg.workers = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(jjgz::compute_noise_vegas(f.sol, f.p, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}
BENCHMARK(BM_NoiseVegas)->Arg(100'000)->Unit(benchmark::kMillisecond);

} // namespace

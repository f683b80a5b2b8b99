#include <benchmark/benchmark.h>

#include "modopo/positivep.hpp"
#include "modopo/qsd.hpp"
#include "modopo/semiclassical.hpp"

namespace {

modopo::ModelParams reference_params(double f1_over_fbar)
{
    modopo::DimensionlessConfig c;
    c.f1_over_fbar = f1_over_fbar;
    return modopo::make_params(c);
}

void BM_IntegrateN0(benchmark::State& state)
{
    const auto p = reference_params(1.2);
    const auto grid = modopo::period_grid(modopo::derive_params(p).period * 10, 512);
    for (auto _ : state) {
        benchmark::DoNotOptimize(modopo::integrate_n0(p, grid, 1e8));
    }
}
BENCHMARK(BM_IntegrateN0)->Unit(benchmark::kMillisecond);

void BM_PeriodicSteadyState(benchmark::State& state)
{
    const auto p = reference_params(1.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(modopo::periodic_steady_state(p));
    }
}
BENCHMARK(BM_PeriodicSteadyState)->Unit(benchmark::kMillisecond);

void BM_PositivePStep(benchmark::State& state)
{
    modopo::DimensionlessConfig c;
    c.fbar_over_fth = 2.0;
    c.f1_over_fbar = 0.5;
    const auto p = modopo::make_params_with_lambda(c, 0.01);
    const modopo::StepContext ctx(p);
    modopo::GaussianStream rng(1, 0);
    modopo::PPState s{10.0, 10.0, 10.0, 10.0, 0.0};
    for (auto _ : state) {
        s = modopo::step_trajectory(s, ctx, 1e-3, rng);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_PositivePStep);

void BM_QsdStep(benchmark::State& state)
{
    modopo::DimensionlessConfig c;
    c.fbar_over_fth = 1.0;
    c.f1_over_fbar = 0.5;
    const auto p = modopo::make_params_with_lambda(c, 0.1);
    const auto ops = modopo::build_operators(p, static_cast<std::size_t>(state.range(0)));
    modopo::GaussianStream rng(1, 0);
    auto psi = modopo::vacuum_state(ops);
    for (int i = 0; i < 2000; ++i) {
        psi = modopo::qsd_step(psi, ops, modopo::effective_pump(p, psi.t), 1e-3, rng, 1.0);
    }
    for (auto _ : state) {
        psi = modopo::qsd_step(psi, ops, modopo::effective_pump(p, psi.t), 1e-3, rng, 1.0);
        benchmark::DoNotOptimize(psi);
    }
}
BENCHMARK(BM_QsdStep)->Arg(14)->Arg(30);

}  // namespace
BENCHMARK_MAIN();

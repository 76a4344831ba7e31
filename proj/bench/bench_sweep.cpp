// Serial reference versus OpenMP map over a frequency grid.

#include "eprifo/conditioning.hpp"
#include "eprifo/solver.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace eprifo;

IfoParams tuned()
{
    IfoParams p = IfoParams::reference_design();
    SolverConfig cfg;
    cfg.n_min = cfg.n_max = 5;
    static const SolverSolution sol = solve(p, cfg);
    return sol.apply(p);
}

void conditional_sweep(benchmark::State& state, Exec exec)
{
    const IfoParams p = tuned();
    const EprSource src = EprSource::from_db(15.0);
    FrequencyGrid g;
    g.n_points = static_cast<std::size_t>(state.range(0));
    const auto w = g.omegas();
    PipelineOptions opt;
    opt.exec = exec;
    opt.losses = {100e-6, 2000e-6, 0.05, 0.05};
    for (auto _ : state) {
        auto s = conditional_strain_spectrum(p, src, w, opt);
        benchmark::DoNotOptimize(s.s_hh.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void idler_sweep(benchmark::State& state, Exec exec)
{
    const IfoParams p = tuned();
    FrequencyGrid g;
    g.n_points = static_cast<std::size_t>(state.range(0));
    const auto w = g.omegas();
    const double phc = applied_compensation(p);
    for (auto _ : state) {
        auto r = map_grid(w, [&](double x) { return idler_response(p, x, phc, {}).phi_rot_achieved; }, exec);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_conditional_serial(benchmark::State& s) { conditional_sweep(s, Exec::serial); }
void BM_conditional_parallel(benchmark::State& s) { conditional_sweep(s, Exec::parallel); }
void BM_idler_serial(benchmark::State& s) { idler_sweep(s, Exec::serial); }
void BM_idler_parallel(benchmark::State& s) { idler_sweep(s, Exec::parallel); }

}  // namespace

BENCHMARK(BM_conditional_serial)->Arg(400)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_conditional_parallel)->Arg(400)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_idler_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_idler_parallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

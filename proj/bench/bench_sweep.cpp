// Serial reference vs OpenMP sweep kernel on the default DOE grid.

#include "qhe/doe.hpp"
#include "qhe/sweep.hpp"

#include <benchmark/benchmark.h>

using namespace qhe;

namespace {

CellFunction case_function(EngineKind kind) {
    const FactorLevels levels;
    const DoeDesign design = build_design(levels);
    EngineSettings s;
    s.engine = kind;
    return make_cell_function(s, bath_for(design.cases[4], levels));
}

void run(benchmark::State& state, EngineKind kind, bool parallel) {
    GridSpec grid;
    grid.omega20.count = static_cast<std::size_t>(state.range(0));
    grid.lam.count = static_cast<std::size_t>(state.range(0));
    const CellFunction fn = case_function(kind);
    for (auto _ : state) {
        SweepGrid g = parallel ? sweep_parallel(grid, fn) : sweep_serial(grid, fn);
        benchmark::DoNotOptimize(g.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_KineticSerial(benchmark::State& s) { run(s, EngineKind::Kinetic, false); }
void BM_KineticParallel(benchmark::State& s) { run(s, EngineKind::Kinetic, true); }
void BM_GklsSerial(benchmark::State& s) { run(s, EngineKind::Gkls, false); }
void BM_GklsParallel(benchmark::State& s) { run(s, EngineKind::Gkls, true); }

} // namespace

BENCHMARK(BM_KineticSerial)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KineticParallel)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GklsSerial)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GklsParallel)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

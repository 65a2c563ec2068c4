#include <benchmark/benchmark.h>

#include "hvlab/analysis.hpp"
#include "hvlab/discrete_model.hpp"
#include "hvlab/engine.hpp"
#include "hvlab/paper_model.hpp"
#include "hvlab/rng.hpp"

namespace {

using namespace hvlab;

void BM_PhiloxUniform(benchmark::State& state) {
    PhiloxRng rng(1);
    double acc = 0.0;
    for (auto _ : state) {
        acc += rng.uniform();
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_PhiloxUniform);

void BM_McJointPaper(benchmark::State& state) {
    PaperModel model;
    engine::McOptions opts;
    opts.n_samples = static_cast<std::uint64_t>(state.range(0));
    opts.seed = 1;
    opts.n_workers = static_cast<int>(state.range(1));
    Angle a(0.0), b(1.1);
    for (auto _ : state) {
        auto est = engine::mc_estimate_joint(model, a, b, opts);
        benchmark::DoNotOptimize(est);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McJointPaper)->Args({1 << 18, 1})->Args({1 << 18, 4})->Args({1 << 20, 4});

void BM_ExactJointPaper(benchmark::State& state) {
    PaperModel model;
    Angle a(0.3), b(2.2);
    for (auto _ : state) {
        auto table = engine::exact_joint(model, a, b);
        benchmark::DoNotOptimize(table);
    }
}
BENCHMARK(BM_ExactJointPaper);

void BM_ExactJointGrid(benchmark::State& state) {
    DiscreteModel grid = discretize_paper_model(static_cast<int>(state.range(0)));
    Angle a = grid.settings_a[0], b = grid.settings_b[2];
    for (auto _ : state) {
        auto table = engine::exact_joint(grid, a, b);
        benchmark::DoNotOptimize(table);
    }
}
BENCHMARK(BM_ExactJointGrid)->Arg(360)->Arg(3600);

void BM_CrLocalityGrid(benchmark::State& state) {
    DiscreteModel grid = discretize_paper_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto report = analysis::check_cr_locality(grid);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_CrLocalityGrid)->Arg(72)->Arg(360);

void BM_DecomposeGrid(benchmark::State& state) {
    DiscreteModel grid = discretize_paper_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto report = analysis::cr_decompose(grid);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_DecomposeGrid)->Arg(72)->Arg(360);

}  // namespace

BENCHMARK_MAIN();

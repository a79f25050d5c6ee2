#include <benchmark/benchmark.h>
#include <omp.h>

#include "bidop/experiments.hpp"

namespace {

bidop::SweepConfig bench_config(int n_static, std::size_t trials) {
    bidop::SweepConfig c;
    c.axis = bidop::SweepAxis::n_static;
    c.axis_values = {static_cast<double>(n_static)};
    c.n_trials = trials;
    return c;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto cfg = bench_config(static_cast<int>(state.range(0)), 500);
    for (auto _ : state) benchmark::DoNotOptimize(bidop::run_sweep_serial(cfg));
    state.SetItemsProcessed(state.iterations() * 3 * 500);
}

void BM_SweepParallel(benchmark::State& state) {
    const auto cfg = bench_config(static_cast<int>(state.range(0)), 500);
    for (auto _ : state) benchmark::DoNotOptimize(bidop::run_sweep(cfg));
    state.SetItemsProcessed(state.iterations() * 3 * 500);
    state.counters["threads"] = omp_get_max_threads();
}

void BM_SweepWaveform(benchmark::State& state) {
    auto cfg = bench_config(2, 10);
    cfg.route = bidop::SynthesisRoute::waveform;
    for (auto _ : state) benchmark::DoNotOptimize(bidop::run_sweep(cfg));
    state.SetItemsProcessed(state.iterations() * 3 * 10);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepWaveform)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

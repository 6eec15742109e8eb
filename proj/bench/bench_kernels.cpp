// Serial reference kernels against their OpenMP counterparts.
// Run e.g. `OMP_NUM_THREADS=4 ./bench_kernels`.

#include <benchmark/benchmark.h>

#include <span>
#include <vector>

#include "biaslab/figures.hpp"
#include "biaslab/kernels.hpp"

namespace {

using namespace biaslab;

const LinearSCM& fig1() {
    static const LinearSCM m = figures::instrument_model(0.3, 0.5, 0.4, 0.6);
    return m;
}

const kernels::Columns& sample_columns() {
    static const kernels::Columns cols = [] {
        const kernels::LinearRowGenerator gen(fig1(), kernels::Disturbance::Gaussian);
        return kernels::parallel::generate(gen, rng::stream_key(1, 0), 200'000);
    }();
    return cols;
}

std::vector<std::span<const double>> views() {
    const auto& cols = sample_columns();
    return {cols.begin(), cols.end()};
}

template <bool Parallel>
void generate(benchmark::State& state) {
    const kernels::LinearRowGenerator gen(fig1(), kernels::Disturbance::Gaussian);
    const auto rows = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto cols = Parallel ? kernels::parallel::generate(gen, rng::stream_key(2, 0), rows)
                             : kernels::serial::generate(gen, rng::stream_key(2, 0), rows);
        benchmark::DoNotOptimize(cols.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void stream_moments(benchmark::State& state) {
    const kernels::LinearRowGenerator gen(fig1(), kernels::Disturbance::Gaussian);
    const auto rows = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        Moments m = Parallel ? kernels::parallel::stream_moments(gen, rng::stream_key(3, 0), rows)
                             : kernels::serial::stream_moments(gen, rng::stream_key(3, 0), rows);
        benchmark::DoNotOptimize(m.comoment.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void column_moments(benchmark::State& state) {
    const auto v = views();
    for (auto _ : state) {
        Moments m = Parallel ? kernels::parallel::column_moments(v) : kernels::serial::column_moments(v);
        benchmark::DoNotOptimize(m.comoment.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.front().size()));
}

template <bool Parallel>
void bootstrap(benchmark::State& state) {
    const auto v = views();
    const auto resamples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto out = Parallel ? kernels::parallel::bootstrap_moments(v, 4, resamples)
                            : kernels::serial::bootstrap_moments(v, 4, resamples);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(generate<false>)->Name("generate/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(generate<true>)->Name("generate/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(stream_moments<false>)->Name("stream_moments/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(stream_moments<true>)->Name("stream_moments/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(column_moments<false>)->Name("column_moments/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(column_moments<true>)->Name("column_moments/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(bootstrap<false>)->Name("bootstrap/serial")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(bootstrap<true>)->Name("bootstrap/parallel")->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "dcor/code_matrix.hpp"
#include "dcor/correlation.hpp"
#include "dcor/objective.hpp"

namespace {

struct State {
    dcor::CodeMatrix x;
    dcor::CorrelationSet u;
    dcor::PowerTable table;

    State(std::size_t n, std::size_t len, double p)
        : x(dcor::random_code_matrix(n, len, 3)), u(dcor::correlate_fft(x)), table({p}, len) {}
};

void BM_Delta(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto len = static_cast<std::size_t>(state.range(1));
    State s(n, len, 6.0);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcor::delta_estimate(s.x, s.u, {k % n, (k * 7919) % len}, s.table));
        ++k;
    }
    state.counters["terms/s"] = benchmark::Counter(static_cast<double>(n * len) * state.iterations(),
                                                   benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Delta)->Args({63, 1023})->Args({100, 4092});

void BM_Objective(benchmark::State& state) {
    State s(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(dcor::objective(s.u, s.table));
}
BENCHMARK(BM_Objective)->Args({63, 1023})->Unit(benchmark::kMillisecond);

// Full rebuild versus one incremental update; their ratio is the payoff of
// maintaining the delta matrix.
void BM_DeltaMatrixFull(benchmark::State& state) {
    State s(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(dcor::delta_matrix_full(s.x, s.u, s.table));
}
BENCHMARK(BM_DeltaMatrixFull)->Args({32, 512})->Unit(benchmark::kMillisecond);

void BM_DeltaMatrixUpdate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto len = static_cast<std::size_t>(state.range(1));
    State s(n, len, 6.0);
    auto deltas = dcor::delta_matrix_full(s.x, s.u, s.table);
    std::size_t k = 0;
    for (auto _ : state) {
        dcor::update_delta_matrix(deltas, s.x, s.u, {k % n, (k * 7919) % len}, s.table);
        ++k;
    }
}
BENCHMARK(BM_DeltaMatrixUpdate)->Args({32, 512})->Unit(benchmark::kMillisecond);

} // namespace

#include <benchmark/benchmark.h>

#include "dcor/code_matrix.hpp"
#include "dcor/correlation.hpp"

namespace {

void BM_CorrelateFft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto len = static_cast<std::size_t>(state.range(1));
    const auto x = dcor::random_code_matrix(n, len, 1);
    for (auto _ : state) benchmark::DoNotOptimize(dcor::correlate_fft(x));
}
BENCHMARK(BM_CorrelateFft)->Args({8, 127})->Args({63, 1023})->Unit(benchmark::kMillisecond);

void BM_CorrelateNaive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto len = static_cast<std::size_t>(state.range(1));
    const auto x = dcor::random_code_matrix(n, len, 1);
    for (auto _ : state) benchmark::DoNotOptimize(dcor::correlate_naive(x));
}
BENCHMARK(BM_CorrelateNaive)->Args({8, 127})->Unit(benchmark::kMillisecond);

void BM_ApplyFlip(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto len = static_cast<std::size_t>(state.range(1));
    auto x = dcor::random_code_matrix(n, len, 2);
    auto u = dcor::correlate_fft(x);
    std::size_t k = 0;
    for (auto _ : state) {
        const dcor::BitIndex idx{k % n, (k * 7919) % len};
        dcor::apply_flip(u, x, idx);
        x.flip(idx);
        ++k;
    }
}
BENCHMARK(BM_ApplyFlip)->Args({63, 1023});

} // namespace

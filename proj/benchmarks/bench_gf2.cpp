#include <benchmark/benchmark.h>

#include "hbtree/rng.hpp"
#include "hbtree/toeplitz.hpp"

using namespace hbtree;

namespace {

Seed bench_seed(std::uint64_t n) { return derive_seed(Seed{}, "bench", n); }

void BM_MatVecMul(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    SeededStream s(bench_seed(0));
    const BitMatrix m = s.uniform_matrix(rows, cols);
    const BitVector v = s.uniform_vector(cols);
    for (auto _ : state) {
        BitVector z = mat_vec_mul(m, v);
        benchmark::DoNotOptimize(z);
    }
    state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_MatVecMul)->Args({80, 256})->Args({212, 330})->Args({102, 330})->Args({96, 224});

void BM_ToeplitzVecMat(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    SeededStream s(bench_seed(1));
    const ToeplitzMatrix t(rows, cols, s.uniform_vector(rows + cols - 1));
    const BitVector v = s.uniform_vector(rows);
    for (auto _ : state) {
        BitVector z = vec_mat_mul(v, t);
        benchmark::DoNotOptimize(z);
    }
    state.SetItemsProcessed(state.iterations() * cols);
}
BENCHMARK(BM_ToeplitzVecMat)->Args({80, 212})->Args({330, 212});

void BM_ToeplitzDenseExpand(benchmark::State& state) {
    SeededStream s(bench_seed(2));
    const ToeplitzMatrix t(330, 212, s.uniform_vector(330 + 212 - 1));
    const BitVector v = s.uniform_vector(330);
    const BitMatrix dense = transpose(t.expand());
    for (auto _ : state) {
        BitVector z = mat_vec_mul(dense, v);
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_ToeplitzDenseExpand);

void BM_UniformMatrix(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    SeededStream s(bench_seed(3));
    for (auto _ : state) {
        BitMatrix m = s.uniform_matrix(rows, cols);
        benchmark::DoNotOptimize(m);
    }
    state.SetBytesProcessed(state.iterations() * BitVector::word_count_for(cols) * rows * 8);
}
BENCHMARK(BM_UniformMatrix)->Args({80, 256})->Args({212, 330});

void BM_BernoulliVector(benchmark::State& state) {
    SeededStream s(bench_seed(4));
    const NoiseRate eps = NoiseRate::from_double(0.25);
    for (auto _ : state) {
        BitVector v = s.bernoulli_vector(static_cast<std::size_t>(state.range(0)), eps);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_BernoulliVector)->Arg(80)->Arg(212);

} // namespace

BENCHMARK_MAIN();

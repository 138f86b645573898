#include <benchmark/benchmark.h>

#include "hbtree/analysis.hpp"
#include "hbtree/tree.hpp"

using namespace hbtree;

namespace {

Seed bench_seed(std::uint64_t n) { return derive_seed(Seed{}, "bench_protocol", n); }

ProtocolParams table_row_1() {
    ProtocolParams p;
    p.eps = NoiseRate::from_double(0.25);
    p.k_x = 80;
    p.k_y = 330;
    p.r = 212;
    p.r_tr = 102;
    p.tau = 63;
    p.d = 2;
    p.beta = 1000;
    p.s = 4;
    return p;
}

void BM_ProtocolRun(benchmark::State& state) {
    ProtocolParams p = table_row_1();
    p.beta = static_cast<std::uint64_t>(state.range(0));
    SeededStream sys(bench_seed(0));
    TreeDirectory dir = TreeDirectory::setup_system(p.capacity(), p, sys);
    SeededStream reg(bench_seed(1));
    const TagCredential cred = dir.register_tag(0, reg);
    // warm the child-key cache so steady-state cost is measured
    run_protocol_once(dir, cred, bench_seed(2));

    std::uint64_t trial = 0;
    for (auto _ : state) {
        ProtocolOutcome out = run_protocol_once(dir, cred, derive_seed(bench_seed(3), "t", trial++));
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_ProtocolRun)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_TraversalRespond(benchmark::State& state) {
    const ProtocolParams p = table_row_1();
    SeededStream sys(bench_seed(4));
    TreeDirectory dir = TreeDirectory::setup_system(4, [&] {
        ProtocolParams q = p;
        q.beta = 2;
        return q;
    }(), sys);
    SeededStream reg(bench_seed(5));
    const TagCredential cred = dir.register_tag(0, reg);
    SeededStream tag(bench_seed(6));
    ProtocolParams q = p;
    q.beta = 2;
    for (auto _ : state) {
        TraversalMessage msg = tag_traversal_respond(cred, q, tag);
        benchmark::DoNotOptimize(msg);
    }
}
BENCHMARK(BM_TraversalRespond)->Unit(benchmark::kMicrosecond);

void BM_FalseBranchGeneral(benchmark::State& state) {
    for (auto _ : state) {
        auto v = analysis::false_branch_general(static_cast<std::uint32_t>(state.range(0)), 0.25L,
                                                static_cast<std::uint64_t>(state.range(1)));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_FalseBranchGeneral)->Args({102, 1000})->Args({212, 10000});

void BM_Planner(benchmark::State& state) {
    for (auto _ : state) {
        auto res = analysis::plan_parameters(1000000, 1e-4L, 1e-8L, 0.25L, 2);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_Planner)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

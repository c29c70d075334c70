// Microbenchmarks for the hot paths: bracket evaluation by both routes,
// cumulants by both routes, full family verification, the Maurer-Cartan
// solver, and reduction through the contraction.

#include <benchmark/benchmark.h>

#include <vector>

#include "bvinf/fixtures.hpp"
#include "bvinf/mc.hpp"
#include "bvinf/operators.hpp"

using namespace bvinf;

namespace {

const Truncation kBench{12, 6, 4, 0};

AlgebraElement t_power(const SigPtr& sig, int n) {
    AlgebraElement e = AlgebraElement::unit(sig);
    auto t = AlgebraElement::generator(sig, 0);
    for (int i = 0; i < n; ++i) e = e * t;
    return e;
}

void BM_KoszulBracketCommutators(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    const SigPtr& a = bundle.source.sig;
    auto dt = AlgebraElement::generator(a, 1);
    std::vector<AlgebraElement> args{t_power(a, 2) * dt, t_power(a, 3), t_power(a, 4)};
    for (auto _ : state)
        benchmark::DoNotOptimize(koszul_bracket(bundle.source.delta, args));
}
BENCHMARK(BM_KoszulBracketCommutators);

void BM_KoszulBracketExpansion(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    const SigPtr& a = bundle.source.sig;
    auto dt = AlgebraElement::generator(a, 1);
    std::vector<AlgebraElement> args{t_power(a, 2) * dt, t_power(a, 3), t_power(a, 4)};
    for (auto _ : state)
        benchmark::DoNotOptimize(koszul_bracket_expansion(bundle.source.delta, args));
}
BENCHMARK(BM_KoszulBracketExpansion);

void BM_CumulantPartitions(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    const SigPtr& a = bundle.source.sig;
    std::vector<AlgebraElement> args(5, t_power(a, 2));
    for (auto _ : state)
        benchmark::DoNotOptimize(cumulant_partitions(bundle.f->map, args));
}
BENCHMARK(BM_CumulantPartitions);

void BM_CumulantProbe(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    const SigPtr& a = bundle.source.sig;
    std::vector<AlgebraElement> args(5, t_power(a, 2));
    for (auto _ : state)
        benchmark::DoNotOptimize(cumulant_probe(bundle.f->map, args));
}
BENCHMARK(BM_CumulantProbe);

void BM_VerifyBV(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    BVVerifyOptions opt;
    opt.arity_max = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(verify_bv(bundle.source, opt));
}
BENCHMARK(BM_VerifyBV)->Arg(2)->Arg(3)->Arg(4);

void BM_SolveMC(benchmark::State& state) {
    auto bundle = build_a2(kBench);
    Contraction con(bundle.source);
    MCSolveOptions opt;
    opt.max_order = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_mc(con, opt));
}
BENCHMARK(BM_SolveMC)->Arg(3)->Arg(5);

void BM_ReduceModImage(benchmark::State& state) {
    auto bundle = build_a1(kBench);
    Contraction con(bundle.source);
    const SigPtr& a = bundle.source.sig;
    auto s = LaurentSeries::from_element(t_power(a, 10));
    for (auto _ : state)
        benchmark::DoNotOptimize(reduce_mod_image(con, s));
}
BENCHMARK(BM_ReduceModImage);

}  // namespace

BENCHMARK_MAIN();

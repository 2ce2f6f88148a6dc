#include <benchmark/benchmark.h>

#include "ccq/kernels.hpp"
#include "ccq/measures.hpp"
#include "ccq/reductions.hpp"
#include "ccq/spaces.hpp"

using namespace ccq;

namespace {

const SpaceBundle& space(int which) {
    static const SpaceBundle t = thresholds(2000);
    static const SpaceBundle i = intervals(60, 3);
    return which == 0 ? t : i;
}

void BM_PairwiseSerial(benchmark::State& st) {
    const auto& B = space(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::pairwise_serial(B.space, B.domain));
}
void BM_PairwiseParallel(benchmark::State& st) {
    const auto& B = space(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::pairwise_parallel(B.space, B.domain));
}

void BM_CoverSerial(benchmark::State& st) {
    const auto& B = space(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::greedy_cover_serial(B.space, B.domain, 0.02));
}
void BM_CoverParallel(benchmark::State& st) {
    const auto& B = space(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::greedy_cover_parallel(B.space, B.domain, 0.02));
}

void BM_ThetaSerial(benchmark::State& st) {
    const auto& B = space(1);
    for (auto _ : st) benchmark::DoNotOptimize(class_disagreement_coefficient_serial(B.space, B.domain, 0.05));
}
void BM_ThetaParallel(benchmark::State& st) {
    const auto& B = space(1);
    for (auto _ : st) benchmark::DoNotOptimize(class_disagreement_coefficient_parallel(B.space, B.domain, 0.05));
}

void BM_TailSerial(benchmark::State& st) {
    const double b = geometric_sum_bound(50, 0.2, 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(geometric_tail_frequency_serial(50, 0.2, b, 100000, 3));
}
void BM_TailParallel(benchmark::State& st) {
    const double b = geometric_sum_bound(50, 0.2, 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(geometric_tail_frequency_parallel(50, 0.2, b, 100000, 3));
}

}  // namespace

// arg 0: thresholds:2000, arg 1: intervals:60:3
BENCHMARK(BM_PairwiseSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PairwiseParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoverSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoverParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ThetaSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ThetaParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TailSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TailParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

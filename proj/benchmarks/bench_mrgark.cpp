#include <benchmark/benchmark.h>

#include "mrgark/integrator.hpp"
#include "mrgark/monotonicity.hpp"
#include "mrgark/order.hpp"
#include "mrgark/problems.hpp"
#include "mrgark/schemes.hpp"
#include "mrgark/stability.hpp"

using namespace mrgark;

namespace {

void BM_FlattenScheme(benchmark::State& state) {
    const MrGarkScheme s = make_mrk_radau1a(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(flatten(s));
}
BENCHMARK(BM_FlattenScheme)->Arg(2)->Arg(4)->Arg(8);

void BM_OrderResiduals(benchmark::State& state) {
    const MrGarkScheme s = make_mrk_radau1a(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(combined_order_residuals(s));
}
BENCHMARK(BM_OrderResiduals)->Arg(2)->Arg(4);

void BM_ExplicitStep(benchmark::State& state) {
    const MrGarkStepper stepper(make_ssp2_mr(static_cast<int>(state.range(0)),
                                             Ssp2Coupling::LastSlow));
    const PartitionedIvp ivp = make_nlcoupled2();
    for (auto _ : state)
        benchmark::DoNotOptimize(stepper.step(ivp, ivp.y0, 0.0, 0.02));
}
BENCHMARK(BM_ExplicitStep)->Arg(2)->Arg(4)->Arg(8);

void BM_ImplicitStep(benchmark::State& state) {
    const MrGarkStepper stepper(make_mrk_radau1a(static_cast<int>(state.range(0))));
    const PartitionedIvp ivp = make_nlcoupled2();
    for (auto _ : state)
        benchmark::DoNotOptimize(stepper.step(ivp, ivp.y0, 0.0, 0.02));
}
BENCHMARK(BM_ImplicitStep)->Arg(2)->Arg(4);

void BM_StabilityAnalysis(benchmark::State& state) {
    const FlatGarkTableau flat = flatten(make_mrk_radau1a(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(is_algebraically_stable(flat));
}
BENCHMARK(BM_StabilityAnalysis)->Arg(2)->Arg(4)->Arg(8);

void BM_AmRadius(benchmark::State& state) {
    const FlatGarkTableau flat =
        flatten(make_ssp2_mr(static_cast<int>(state.range(0)), Ssp2Coupling::LastSlow));
    for (auto _ : state) benchmark::DoNotOptimize(am_radius(flat));
}
BENCHMARK(BM_AmRadius)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();

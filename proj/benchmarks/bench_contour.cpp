#include <benchmark/benchmark.h>

#include "meroloc/contour.hpp"
#include "meroloc/functions.hpp"

namespace {

using namespace meroloc;

void BM_MomentsExample1(benchmark::State& state) {
    const auto f = make_rational(examples::three_zeros_double_pole());
    const auto rect = Rectangle::from_corners({-1.0, -1.0}, {1.0, 1.0});
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(moments(f, rect, k, 1.49e-8));
    state.counters["evaluations"] = static_cast<double>(f.evaluation_count()) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_MomentsExample1)->Arg(4)->Arg(8)->Arg(16);

void BM_MomentsPlasma(benchmark::State& state) {
    const auto f = make_plasma_z();
    const auto rect = Rectangle::from_corners({0.0, -5.0}, {5.5, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(moments(f, rect, 16, 1.49e-8));
}
BENCHMARK(BM_MomentsPlasma);

void BM_TraceArgument(benchmark::State& state) {
    const auto f = make_nlevp3(examples::transcendental_3x3());
    const auto rect = Rectangle::from_corners({-10.0, -10.0}, {10.0, 10.0});
    for (auto _ : state) benchmark::DoNotOptimize(winding_number(trace_argument(f, rect)));
}
BENCHMARK(BM_TraceArgument);

}  // namespace

BENCHMARK_MAIN();

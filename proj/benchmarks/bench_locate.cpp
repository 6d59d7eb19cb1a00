#include <benchmark/benchmark.h>

#include "meroloc/driver.hpp"

namespace {

using namespace meroloc;

void run(benchmark::State& state, const FunctionHandle& f, const Rectangle& rect) {
    SearchConfig cfg;
    cfg.workers = static_cast<unsigned>(state.range(0));
    std::size_t roots = 0;
    for (auto _ : state) roots = locate(f, rect, cfg).size();
    state.counters["roots"] = static_cast<double>(roots);
}

void BM_LocateExample1(benchmark::State& state) {
    run(state, make_rational(examples::three_zeros_double_pole()), Rectangle::from_corners({-1.0, -1.0}, {1.0, 1.0}));
}
BENCHMARK(BM_LocateExample1)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LocateNlevp3(benchmark::State& state) {
    run(state, make_nlevp3(examples::transcendental_3x3()), Rectangle::from_corners({-10.0, -10.0}, {10.0, 10.0}));
}
BENCHMARK(BM_LocateNlevp3)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LocatePlasma(benchmark::State& state) {
    run(state, make_plasma_z(), Rectangle::from_corners({0.0, -5.0}, {5.5, 0.0}));
}
BENCHMARK(BM_LocatePlasma)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LocateGyrokinetic(benchmark::State& state) {
    run(state, make_gyrokinetic({}), Rectangle::from_corners({0.05, -5.0}, {5.0, 2.0}));
}
BENCHMARK(BM_LocateGyrokinetic)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

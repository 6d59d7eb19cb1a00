#include <benchmark/benchmark.h>

#include <random>

#include "meroloc/prony.hpp"
#include "oracles.hpp"

namespace {

using meroloc::Complex;

meroloc::MomentVector synthetic_moments(std::size_t n) {
    std::mt19937_64 rng(n);
    std::vector<oracle::WeightedNode> nodes;
    int w = 0;
    for (const auto& [z, m] : oracle::random_annulus_roots(rng, n, 0.5, 0.3)) {
        nodes.push_back({z, double(m)});
        w += m;
    }
    meroloc::MomentVector m;
    m.values = oracle::power_sums(nodes, 2 * n + 3);
    m.values[0] = Complex(double(w), 0.0);
    m.winding = w;
    m.eps_i = m.requested_eps = 1e-14;
    return m;
}

void BM_CountRoots(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = synthetic_moments(n);
    for (auto _ : state) benchmark::DoNotOptimize(meroloc::count_roots(m, n));
}
BENCHMARK(BM_CountRoots)->DenseRange(1, 8);

void BM_Analyse(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = synthetic_moments(n);
    for (auto _ : state) benchmark::DoNotOptimize(meroloc::analyse(m, n));
}
BENCHMARK(BM_Analyse)->DenseRange(1, 8);

}  // namespace

BENCHMARK_MAIN();

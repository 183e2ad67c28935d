#include <benchmark/benchmark.h>

#include <random>

#include "homer/clustering.hpp"

using namespace homer;

namespace {

std::vector<LabelVector> points(std::size_t n, std::size_t dim, double density) {
    std::mt19937_64 rng(n);
    std::bernoulli_distribution bit(density);
    std::vector<LabelVector> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i].label_id = static_cast<LabelId>(i);
        pts[i].dimension = dim;
        for (std::size_t d = 0; d < dim; ++d)
            if (bit(rng)) pts[i].bits.push_back(static_cast<std::uint32_t>(d));
    }
    return pts;
}

void BM_BalancedKMeans(benchmark::State& state) {
    const auto pts = points(static_cast<std::size_t>(state.range(0)), 2000, 0.02);
    const ClusterParams params{static_cast<std::size_t>(state.range(1)), 3, 1};
    for (auto _ : state) benchmark::DoNotOptimize(balanced_kmeans(pts, params));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BalancedKMeans)->ArgsProduct({{250, 500, 1000, 2000}, {3}})->Complexity();
BENCHMARK(BM_BalancedKMeans)->ArgsProduct({{1000}, {2, 4, 8, 10}});

void BM_PlainKMeans(benchmark::State& state) {
    const auto pts = points(static_cast<std::size_t>(state.range(0)), 2000, 0.02);
    const ClusterParams params{3, 3, 1};
    for (auto _ : state) benchmark::DoNotOptimize(plain_kmeans(pts, params));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PlainKMeans)->RangeMultiplier(2)->Range(250, 2000)->Complexity();

}  // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "homer/hierarchy.hpp"
#include "homer/learner.hpp"
#include "homer/synthetic.hpp"

using namespace homer;

namespace {

SyntheticCorpus corpus(std::size_t labels) {
    SyntheticSpec spec;
    spec.num_labels = labels;
    spec.train_instances = 20 * labels;
    spec.test_instances = 0;
    spec.zipf_exponent = 1.0;
    return generate_corpus(spec);
}

LearnerParams params() {
    LearnerParams p;
    p.epochs = 50;
    return p;
}

void BM_TrainFlatBR(benchmark::State& state) {
    const auto c = corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(train_flat_br(c.train, params()));
}
BENCHMARK(BM_TrainFlatBR)->Arg(27)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_TrainHomer(benchmark::State& state) {
    const auto c = corpus(static_cast<std::size_t>(state.range(0)));
    const auto tree = build_hierarchy(c.train, {3, 9, 3, 1});
    for (auto _ : state) benchmark::DoNotOptimize(train_homer(c.train, tree, params()));
}
BENCHMARK(BM_TrainHomer)->Arg(27)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_BuildHierarchy(benchmark::State& state) {
    const auto c = corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_hierarchy(c.train, {3, 9, 3, 1}));
}
BENCHMARK(BM_BuildHierarchy)->Arg(81)->Arg(243)->Unit(benchmark::kMillisecond);

}  // namespace

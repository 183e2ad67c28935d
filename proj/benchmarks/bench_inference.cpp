#include <benchmark/benchmark.h>

#include "homer/hierarchy.hpp"
#include "homer/inference.hpp"
#include "homer/learner.hpp"
#include "homer/synthetic.hpp"

using namespace homer;

namespace {

struct Fixture {
    SyntheticCorpus data;
    HomerModel homer;
    HomerModel br;
};

const Fixture& fixture() {
    static const Fixture f = [] {
        SyntheticSpec spec;
        spec.num_labels = 243;
        spec.train_instances = 3000;
        spec.test_instances = 500;
        Fixture out;
        out.data = generate_corpus(spec);
        LearnerParams lp;
        lp.epochs = 30;
        out.homer = train_homer(out.data.train, build_hierarchy(out.data.train, {3, 9, 3, 1}), lp);
        out.br = train_flat_br(out.data.train, lp);
        return out;
    }();
    return f;
}

void BM_PredictBipartition(benchmark::State& state) {
    const auto& f = fixture();
    const auto& model = state.range(0) ? f.homer : f.br;
    for (auto _ : state)
        for (const auto& inst : f.data.test.instances) benchmark::DoNotOptimize(predict_bipartition(model, inst.features));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.test.size()));
}
BENCHMARK(BM_PredictBipartition)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PredictRanking(benchmark::State& state) {
    const auto& f = fixture();
    const bool prune = state.range(0) != 0;
    for (auto _ : state)
        for (const auto& inst : f.data.test.instances)
            benchmark::DoNotOptimize(predict_ranking(f.homer, inst.features, prune));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.test.size()));
}
BENCHMARK(BM_PredictRanking)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

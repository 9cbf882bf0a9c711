#include <benchmark/benchmark.h>

#include <random>

#include "reportrl/grpo.hpp"

using namespace reportrl;

namespace {

PolicyParams random_params(std::mt19937& rng) {
    PolicyParams params;
    std::normal_distribution<double> gauss(0.0, 0.8);
    for (std::size_t i = 0; i < params.size(); ++i) *params.data_at(i) = gauss(rng);
    return params;
}

void BM_SampleGroup(benchmark::State& state) {
    std::mt19937 init(1);
    const PolicyParams params = random_params(init);
    Observation obs;
    obs.evidence.fill(Evidence::Ambiguous);
    Rng rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_group(params, obs, 8, rng));
    }
}
BENCHMARK(BM_SampleGroup);

void BM_ObjectiveAndGradient(benchmark::State& state) {
    std::mt19937 init(3);
    const PolicyParams params = random_params(init);
    const PolicyParams ref = random_params(init);
    Observation obs;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        obs.evidence[c] = static_cast<Evidence>(c % kEvidenceCount);
    }
    Rng rng(4);
    CandidateGroup group = sample_group(params, obs, 8, rng);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (auto& candidate : group.candidates) candidate.reward.total = unit(init);
    compute_advantages(group, 1e-4);
    TrainConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grpo_objective(params, group, ref, cfg));
    }
}
BENCHMARK(BM_ObjectiveAndGradient);

void BM_TrainIteration(benchmark::State& state) {
    CorpusSpec spec;
    spec.n_studies = 100;
    spec.seed = 9;
    const auto corpus = generate_corpus(spec);
    TrainConfig cfg;
    cfg.warm_start_epochs = 20;
    cfg.iterations = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(cfg, corpus));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainIteration)->Arg(50);

}  // namespace

BENCHMARK_MAIN();

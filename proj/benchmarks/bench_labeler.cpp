#include <benchmark/benchmark.h>

#include "reportrl/corpus.hpp"
#include "reportrl/labeler.hpp"

using namespace reportrl;

namespace {

const std::vector<StudyRecord>& bench_corpus() {
    static const std::vector<StudyRecord> corpus = [] {
        CorpusSpec spec;
        spec.n_studies = 512;
        spec.seed = 1;
        spec.default_rates.positive = 0.3;
        spec.default_rates.uncertain = 0.1;
        return generate_corpus(spec);
    }();
    return corpus;
}

void BM_ExtractLabels(benchmark::State& state) {
    const auto& corpus = bench_corpus();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& study = corpus[i++ % corpus.size()];
        benchmark::DoNotOptimize(extract_labels(study.findings_text));
    }
}
BENCHMARK(BM_ExtractLabels);

void BM_GenerateCorpus(benchmark::State& state) {
    CorpusSpec spec;
    spec.n_studies = static_cast<std::size_t>(state.range(0));
    spec.seed = 7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_corpus(spec));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateCorpus)->Arg(100)->Arg(1000);

}  // namespace

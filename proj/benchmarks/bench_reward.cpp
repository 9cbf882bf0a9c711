#include <benchmark/benchmark.h>

#include "reportrl/corpus.hpp"
#include "reportrl/reward.hpp"

using namespace reportrl;

namespace {

void BM_TotalReward(benchmark::State& state) {
    CorpusSpec spec;
    spec.n_studies = 64;
    spec.seed = 3;
    const auto corpus = generate_corpus(spec);
    RewardContext ctx;
    ctx.idf = build_idf(corpus);
    std::vector<StructuredOutput> outputs;
    for (const auto& study : corpus) {
        outputs.push_back(parse_output(render_output(study.findings_text, study.labels)));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& study = corpus[i % corpus.size()];
        benchmark::DoNotOptimize(
            total_reward(outputs[i % outputs.size()], study.labels, study.findings_text, ctx));
        ++i;
    }
}
BENCHMARK(BM_TotalReward);

void BM_ParseOutput(benchmark::State& state) {
    CorpusSpec spec;
    spec.n_studies = 64;
    spec.seed = 4;
    const auto corpus = generate_corpus(spec);
    std::vector<std::string> raw;
    for (const auto& study : corpus) {
        raw.push_back(render_output(study.findings_text, study.labels));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_output(raw[i++ % raw.size()]));
    }
}
BENCHMARK(BM_ParseOutput);

}  // namespace

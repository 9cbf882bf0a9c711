#include <benchmark/benchmark.h>

#include "reportrl/corpus.hpp"
#include "reportrl/metrics.hpp"
#include "reportrl/tokenize.hpp"

using namespace reportrl;

namespace {

void BM_CorpusBleu(benchmark::State& state) {
    CorpusSpec spec;
    spec.n_studies = 256;
    spec.seed = 5;
    const auto corpus = generate_corpus(spec);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& study : corpus) tokens.push_back(tokenize(study.findings_text));
    for (auto _ : state) {
        BleuAccumulator bleu;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            bleu.add(tokens[i], tokens[(i + 1) % tokens.size()]);
        }
        benchmark::DoNotOptimize(bleu.score(4));
    }
}
BENCHMARK(BM_CorpusBleu);

void BM_RougeL(benchmark::State& state) {
    const auto a = tokenize(
        "Atelectasis is present in the lung bases. There is a small right pleural effusion. "
        "Possible pneumonia. An endotracheal tube is in place.");
    const auto b = tokenize(
        "There is no pleural effusion. Findings are consistent with pneumonia. "
        "No acute fracture is seen.");
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge_l(a, b));
    }
}
BENCHMARK(BM_RougeL);

}  // namespace

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "reportrl/labeler.hpp"
#include "reportrl/labels.hpp"
#include "reportrl/protocol.hpp"

namespace reportrl {

// Sentence-level BLEU-n: geometric mean of modified n-gram precisions up to
// n (uniform weights) times the brevity penalty. 0 when the candidate is
// empty or any precision is zero.
double bleu_n(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              int n);

// Corpus-level BLEU pools clipped counts and lengths across pairs before
// taking the geometric mean, the multi-bleu convention.
class BleuAccumulator {
  public:
    void add(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);
    double score(int n) const;

  private:
    std::array<long long, 4> matched_{};
    std::array<long long, 4> total_{};
    long long candidate_length_ = 0;
    long long reference_length_ = 0;
};

// LCS-based F-measure with equal-weight harmonic mean (beta = 1), hence
// symmetric in its arguments. 0 when either side is empty.
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

enum class F1Mode { Macro, Micro };

// How Uncertain labels count when binarizing to the positive class.
enum class UncertainPolicy { NonPositive, Positive };

// Multilabel F1 with Positive as the positive class. Macro averages
// per-category F1, skipping categories whose pooled TP+FP+FN is zero; if
// every category is skipped (or the micro pool is empty) the score is 1.0,
// since vacuous agreement counts as perfect. Throws on length mismatch.
double multilabel_f1(const std::vector<LabelVector>& preds, const std::vector<LabelVector>& truths,
                     F1Mode mode, UncertainPolicy policy = UncertainPolicy::NonPositive);

// Self-consistency: F1 agreement between labels extracted from each output's
// narrative and the output's own answer block. Outputs without answer labels
// count as all-non-positive predictions. Returns {macro, micro}.
std::pair<double, double> self_consistency(const std::vector<StructuredOutput>& outputs,
                                           const LabelerLexicon& lexicon);

struct MetricsReport {
    std::array<double, 4> bleu{};  // BLEU-1..4, corpus level
    double rouge_l = 0.0;          // mean over studies
    double report_macro_f1 = 0.0;  // extracted narrative labels vs truth
    double report_micro_f1 = 0.0;
    double answer_macro_f1 = 0.0;  // answer labels vs truth
    double answer_micro_f1 = 0.0;
    double scs_macro = 0.0;
    double scs_micro = 0.0;
    std::size_t n_examples = 0;
    // Reserved for values computed by external scorers (e.g. a neural
    // similarity); never populated by this library.
    std::vector<std::pair<std::string, double>> external;

    std::string to_json_text() const;
    // Aligned table, each metric in fraction and x100 form.
    std::string to_table_text() const;
};

struct EvaluationExample {
    StructuredOutput output;
    LabelVector truth_labels;
    std::string reference_text;
};

MetricsReport evaluate(const std::vector<EvaluationExample>& examples,
                       const LabelerLexicon& lexicon,
                       UncertainPolicy policy = UncertainPolicy::NonPositive);

}  // namespace reportrl

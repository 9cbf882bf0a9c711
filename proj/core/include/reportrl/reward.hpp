#pragma once

#include <array>
#include <optional>
#include <string>

#include "reportrl/labeler.hpp"
#include "reportrl/labels.hpp"
#include "reportrl/protocol.hpp"
#include "reportrl/tokenize.hpp"

namespace reportrl {

// A prediction that may omit categories. Omission is scored by the matrix's
// missing column, never thrown on.
using PartialLabels = std::array<std::optional<LabelValue>, kCategoryCount>;

PartialLabels partial_from_labels(const LabelVector& v);
PartialLabels partial_all_missing();

// The asymmetric per-category scoring rule. Ground truth selects the row;
// the prediction (or its absence) selects the column. Defaults:
//   (Positive, Positive) +2.0    (Negative, Negative) +1.0
//   (Positive, Negative) -0.3    (Negative, Positive) -0.3
//   (definitive, Uncertain) 0.0  (definitive, Missing) 0.0
//   (Uncertain, anything)  +0.5
// The matrix is data: ablations and reinterpretations are config edits, not
// code edits. All entries must lie in [-0.3, +2.0].
class CfsScoringMatrix {
  public:
    CfsScoringMatrix();  // defaults above

    double score(LabelValue ground_truth, std::optional<LabelValue> predicted) const;

    void set(LabelValue ground_truth, std::optional<LabelValue> predicted, double value);

    static CfsScoringMatrix from_json_text(const std::string& json_text);
    static CfsScoringMatrix load(const std::string& path);
    std::string to_json_text() const;

  private:
    // rows: ground truth (3), columns: prediction (3) + missing
    std::array<std::array<double, 4>, 3> entries_{};
};

struct RewardWeights {
    double consistency = 0.2;      // narrative vs own answer
    double think_accuracy = 0.5;   // narrative vs ground truth
    double answer_accuracy = 1.0;  // answer vs ground truth
    double semantic = 0.3;         // narrative vs reference text
    double format = 0.5;           // protocol compliance

    static RewardWeights from_json_text(const std::string& json_text);
    static RewardWeights load(const std::string& path);
    std::string to_json_text() const;
};

struct RewardBreakdown {
    double consistency = 0.0;
    double think_accuracy = 0.0;
    double answer_accuracy = 0.0;
    double semantic = 0.0;
    double format = 0.0;
    double total = 0.0;
    // Per-category matrix terms behind the three CFS-based components.
    std::array<double, kCategoryCount> consistency_terms{};
    std::array<double, kCategoryCount> think_accuracy_terms{};
    std::array<double, kCategoryCount> answer_accuracy_terms{};
};

// Mean over the 14 categories of the matrix score, prediction vs truth.
double cfs(const PartialLabels& predicted, const LabelVector& truth,
           const CfsScoringMatrix& matrix);
double cfs(const PartialLabels& predicted, const LabelVector& truth,
           const CfsScoringMatrix& matrix, std::array<double, kCategoryCount>& terms_out);

// Self-check: answer labels scored against the labels extracted from the
// model's own narrative. An absent answer block scores as all-missing.
double consistency_reward(const StructuredOutput& out, const LabelerLexicon& lexicon,
                          const CfsScoringMatrix& matrix);

// Narrative accuracy: extracted think labels scored against ground truth.
double think_accuracy_reward(const StructuredOutput& out, const LabelVector& truth,
                             const LabelerLexicon& lexicon, const CfsScoringMatrix& matrix);

// Answer accuracy: answer labels scored against ground truth.
double answer_accuracy_reward(const StructuredOutput& out, const LabelVector& truth,
                              const CfsScoringMatrix& matrix);

// IDF-weighted one-to-one token-match F1 between the candidate and reference
// token multisets, clamped to [0, 1]. This is the reference similarity; a
// neural scorer can replace it behind the same signature.
double semantic_reward(const std::string& think, const std::string& reference,
                       const IdfTable& idf);

// 0.5 per satisfied indicator: tag structure, syntactically valid JSON.
double format_reward(const FormatFlags& flags);

struct RewardContext {
    RewardWeights weights;
    CfsScoringMatrix matrix;
    LabelerLexicon lexicon = builtin_lexicon();
    IdfTable idf;
};

RewardBreakdown total_reward(const StructuredOutput& out, const LabelVector& truth_labels,
                             const std::string& truth_text, const RewardContext& ctx);

}  // namespace reportrl

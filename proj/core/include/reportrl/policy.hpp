#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "reportrl/labels.hpp"
#include "reportrl/observation.hpp"
#include "reportrl/protocol.hpp"
#include "reportrl/rng.hpp"
#include "reportrl/templates.hpp"

namespace reportrl {

// Per-category finding head: which sentence, if any, the narrative asserts.
enum class FindingAction : std::size_t {
    AssertPositive = 0,
    AssertNegative = 1,
    AssertUncertain = 2,
    Omit = 3,
};
inline constexpr std::size_t kFindingActionCount = 4;

// Per-category answer head: the structured label emitted for the category.
enum class AnswerAction : std::size_t {
    Positive = 0,
    Negative = 1,
    Uncertain = 2,
};
inline constexpr std::size_t kAnswerActionCount = 3;

LabelValue answer_action_value(AnswerAction a);
AnswerAction answer_action_for(LabelValue v);

struct CategoryActions {
    FindingAction finding = FindingAction::Omit;
    AnswerAction answer = AnswerAction::Negative;

    bool operator==(const CategoryActions&) const = default;
};

using ActionSet = std::array<CategoryActions, kCategoryCount>;

// Factorized categorical policy over the 14 categories. The narrative head
// is conditioned on (evidence, category); the answer head is additionally
// conditioned on the narrative head's sampled action, realizing the
// reason-then-summarize chain: the summary can only "see" what the
// narrative asserted.
class PolicyParams {
  public:
    PolicyParams();  // zero logits: uniform policy

    double finding_logit(Evidence e, Category c, FindingAction a) const;
    double& finding_logit(Evidence e, Category c, FindingAction a);
    double answer_logit(Evidence e, Category c, FindingAction f, AnswerAction a) const;
    double& answer_logit(Evidence e, Category c, FindingAction f, AnswerAction a);

    std::array<double, kFindingActionCount> finding_probs(Evidence e, Category c) const;
    std::array<double, kFindingActionCount> finding_log_probs(Evidence e, Category c) const;
    std::array<double, kAnswerActionCount> answer_probs(Evidence e, Category c,
                                                        FindingAction f) const;
    std::array<double, kAnswerActionCount> answer_log_probs(Evidence e, Category c,
                                                            FindingAction f) const;

    std::size_t size() const { return finding_.size() + answer_.size(); }
    double* data_at(std::size_t flat_index);
    double value_at(std::size_t flat_index) const;

    void fill(double value);
    // this += scale * other, entry-wise.
    void add_scaled(const PolicyParams& other, double scale);

    bool operator==(const PolicyParams&) const = default;

    std::string to_json_text() const;
    static PolicyParams from_json_text(const std::string& json_text);
    static PolicyParams load(const std::string& path);
    void save(const std::string& path) const;

  private:
    // [evidence][category][finding action]
    std::vector<double> finding_;
    // [evidence][category][finding action][answer action]
    std::vector<double> answer_;
};

// Exact joint log-probability of the action set under the policy.
double action_log_prob(const PolicyParams& params, const Observation& obs,
                       const ActionSet& actions);

ActionSet sample_actions(const PolicyParams& params, const Observation& obs, Rng& rng);
// Argmax per head, ties to the lowest action index.
ActionSet greedy_actions(const PolicyParams& params, const Observation& obs);

// Narrative text for the asserted sentences, category order; falls back to
// the fixed neutral sentence when every category omits.
std::string render_think(const ActionSet& actions);

LabelVector answer_labels_of(const ActionSet& actions);

// Full protocol render-and-reparse, so candidates carry honest format flags.
StructuredOutput render_candidate(const ActionSet& actions);

// Supervision targets for the warm start: positives asserted, uncertains
// hedged, negatives omitted; answers mirror the labels.
ActionSet target_actions(const LabelVector& labels);

}  // namespace reportrl

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reportrl/corpus.hpp"
#include "reportrl/policy.hpp"
#include "reportrl/reward.hpp"

namespace reportrl {

struct Candidate {
    ActionSet actions;
    StructuredOutput rendered;
    double logprob_old = 0.0;  // under the sampling policy, exact
    double logprob_cur = 0.0;  // under the current policy, exact
    double logprob_ref = 0.0;  // under the frozen reference policy, exact
    RewardBreakdown reward;
    double advantage = 0.0;
};

struct CandidateGroup {
    Observation observation;
    std::vector<Candidate> candidates;  // size G >= 2
    double reward_mean = 0.0;
    double reward_std = 0.0;  // population std
};

struct TrainConfig {
    int group_size = 8;
    double clip_radius = 0.2;        // surrogate ratio clip, in (0, 1)
    double kl_coefficient = 0.03;    // reference-policy KL penalty
    double advantage_epsilon = 1e-4; // std stabilizer; degenerate groups get zero advantage
    double learning_rate = 1.0;
    int iterations = 500;
    std::uint64_t seed = 42;
    RewardWeights weights;
    int warm_start_epochs = 200;
    double warm_start_learning_rate = 2.0;

    std::vector<std::string> validate() const;

    static TrainConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

// G independent draws from the sampling policy, rendered through the
// protocol so every candidate carries honest format flags. Rewards and
// advantages are not populated here.
CandidateGroup sample_group(const PolicyParams& sampling_params, const Observation& obs, int G,
                            Rng& rng);

// advantage = (reward.total - mean) / (population std + epsilon); groups
// with zero spread get exactly-zero advantages.
void compute_advantages(CandidateGroup& group, double advantage_epsilon);

// Exact KL between two explicit categorical distributions.
double categorical_kl(std::span<const double> p, std::span<const double> q);

// Exact KL between factorized policies at an observation: per category the
// narrative-head KL plus the expected answer-head KL under the left policy's
// narrative distribution. No sampling estimator.
double policy_kl(const PolicyParams& p, const PolicyParams& q, const Observation& obs);

struct ObjectiveResult {
    double value = 0.0;
    PolicyParams gradient;  // same shape as the params
};

// Clipped-surrogate group objective minus the scaled reference KL, with the
// analytic gradient. Candidates where the clipped branch is active and
// selected contribute zero surrogate gradient. Throws NumericalError naming
// the candidate on non-finite intermediates.
ObjectiveResult grpo_objective(const PolicyParams& params, const CandidateGroup& group,
                               const PolicyParams& ref_params, const TrainConfig& cfg);

// Full-batch maximum-likelihood fit of both heads to the supervision targets
// derived from corpus labels. Returns the fitted params; the caller freezes
// a copy as the reference policy. Throws on an empty corpus.
PolicyParams warm_start(PolicyParams params, const std::vector<StudyRecord>& corpus, int epochs,
                        double learning_rate);

struct TraceRow {
    int iteration = 0;
    double reward_mean = 0.0;
    double consistency_mean = 0.0;
    double think_accuracy_mean = 0.0;
    double answer_accuracy_mean = 0.0;
    double semantic_mean = 0.0;
    double format_mean = 0.0;
    double kl = 0.0;  // vs the reference policy at this iteration's observation
    double scs_macro = 0.0;
    double scs_micro = 0.0;

    nlohmann::json to_json() const;
};

struct TrainResult {
    PolicyParams warm_params;   // the frozen reference policy
    PolicyParams final_params;
    std::vector<TraceRow> trace;
};

// Observes every scored group before the update, e.g. to append one
// RewardBreakdown per candidate per step to a log.
using GroupObserver = std::function<void(int iteration, const CandidateGroup& group)>;

// Warm start, then the on-policy loop: snapshot the sampling policy every
// iteration, sample a group on a random study, score, standardize, ascend.
// Single-threaded so runs are bit-reproducible under the seed.
TrainResult train(const TrainConfig& cfg, const std::vector<StudyRecord>& corpus,
                  const CfsScoringMatrix& matrix = CfsScoringMatrix(),
                  const LabelerLexicon& lexicon = builtin_lexicon(),
                  const GroupObserver& on_group = {});

}  // namespace reportrl

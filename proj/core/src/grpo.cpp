#include "reportrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reportrl/errors.hpp"
#include "reportrl/metrics.hpp"

namespace reportrl {

std::vector<std::string> TrainConfig::validate() const {
    std::vector<std::string> problems;
    if (group_size < 2) problems.push_back("group_size must be >= 2");
    if (!(clip_radius > 0.0 && clip_radius < 1.0)) {
        problems.push_back("clip_radius must lie in (0, 1)");
    }
    if (kl_coefficient < 0.0) problems.push_back("kl_coefficient must be >= 0");
    if (advantage_epsilon < 0.0) problems.push_back("advantage_epsilon must be >= 0");
    if (learning_rate <= 0.0) problems.push_back("learning_rate must be > 0");
    if (iterations < 0) problems.push_back("iterations must be >= 0");
    if (warm_start_epochs < 0) problems.push_back("warm_start_epochs must be >= 0");
    if (warm_start_learning_rate <= 0.0) {
        problems.push_back("warm_start_learning_rate must be > 0");
    }
    if (weights.consistency < 0.0 || weights.think_accuracy < 0.0 ||
        weights.answer_accuracy < 0.0 || weights.semantic < 0.0 || weights.format < 0.0) {
        problems.push_back("reward weights must be >= 0");
    }
    return problems;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
    TrainConfig cfg;
    if (!doc.is_object()) throw ConfigError("train config: not a JSON object");
    cfg.group_size = doc.value("group_size", cfg.group_size);
    cfg.clip_radius = doc.value("clip_radius", cfg.clip_radius);
    cfg.kl_coefficient = doc.value("kl_coefficient", cfg.kl_coefficient);
    cfg.advantage_epsilon = doc.value("advantage_epsilon", cfg.advantage_epsilon);
    cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
    cfg.iterations = doc.value("iterations", cfg.iterations);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.warm_start_epochs = doc.value("warm_start_epochs", cfg.warm_start_epochs);
    cfg.warm_start_learning_rate =
        doc.value("warm_start_learning_rate", cfg.warm_start_learning_rate);
    if (doc.contains("weights")) {
        cfg.weights = RewardWeights::from_json_text(doc["weights"].dump());
    }
    return cfg;
}

nlohmann::json TrainConfig::to_json() const {
    nlohmann::json doc;
    doc["group_size"] = group_size;
    doc["clip_radius"] = clip_radius;
    doc["kl_coefficient"] = kl_coefficient;
    doc["advantage_epsilon"] = advantage_epsilon;
    doc["learning_rate"] = learning_rate;
    doc["iterations"] = iterations;
    doc["seed"] = seed;
    doc["warm_start_epochs"] = warm_start_epochs;
    doc["warm_start_learning_rate"] = warm_start_learning_rate;
    doc["weights"] = nlohmann::json::parse(weights.to_json_text());
    return doc;
}

CandidateGroup sample_group(const PolicyParams& sampling_params, const Observation& obs, int G,
                            Rng& rng) {
    if (G < 2) throw std::invalid_argument("sample_group: group size must be >= 2");
    CandidateGroup group;
    group.observation = obs;
    group.candidates.reserve(static_cast<std::size_t>(G));
    for (int i = 0; i < G; ++i) {
        Candidate candidate;
        candidate.actions = sample_actions(sampling_params, obs, rng);
        candidate.rendered = render_candidate(candidate.actions);
        candidate.logprob_old = action_log_prob(sampling_params, obs, candidate.actions);
        candidate.logprob_cur = candidate.logprob_old;  // ratio 1 at sampling time
        group.candidates.push_back(std::move(candidate));
    }
    return group;
}

void compute_advantages(CandidateGroup& group, double advantage_epsilon) {
    const std::size_t n = group.candidates.size();
    if (n == 0) return;
    bool all_equal = true;
    for (const auto& candidate : group.candidates) {
        if (candidate.reward.total != group.candidates.front().reward.total) all_equal = false;
    }
    if (all_equal) {
        // exactly-zero advantages; the mean-of-sums rounding must not leak
        // a phantom update out of a degenerate group
        group.reward_mean = group.candidates.front().reward.total;
        group.reward_std = 0.0;
        for (auto& candidate : group.candidates) candidate.advantage = 0.0;
        return;
    }
    double mean = 0.0;
    for (const auto& candidate : group.candidates) mean += candidate.reward.total;
    mean /= static_cast<double>(n);
    double variance = 0.0;
    for (const auto& candidate : group.candidates) {
        const double d = candidate.reward.total - mean;
        variance += d * d;
    }
    variance /= static_cast<double>(n);
    const double std_dev = std::sqrt(variance);
    group.reward_mean = mean;
    group.reward_std = std_dev;
    const double denom = std_dev + advantage_epsilon;
    for (auto& candidate : group.candidates) {
        const double numerator = candidate.reward.total - mean;
        candidate.advantage = denom == 0.0 ? 0.0 : numerator / denom;
    }
}

double categorical_kl(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("categorical_kl: shape mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;  // 0 log 0 = 0
        kl += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return kl;
}

double policy_kl(const PolicyParams& p, const PolicyParams& q, const Observation& obs) {
    double total = 0.0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto p_find = p.finding_probs(e, category);
        const auto q_find = q.finding_probs(e, category);
        total += categorical_kl(p_find, q_find);
        for (std::size_t f = 0; f < kFindingActionCount; ++f) {
            const auto action = static_cast<FindingAction>(f);
            const auto p_ans = p.answer_probs(e, category, action);
            const auto q_ans = q.answer_probs(e, category, action);
            total += p_find[f] * categorical_kl(p_ans, q_ans);
        }
    }
    return total;
}

namespace {

// d(log pi(actions))/dtheta accumulated into grad with the given weight:
// per sampled head, one-hot minus the head's probabilities.
void accumulate_score_gradient(PolicyParams& grad, const PolicyParams& params,
                               const Observation& obs, const ActionSet& actions, double weight) {
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto finding_p = params.finding_probs(e, category);
        const std::size_t f = static_cast<std::size_t>(actions[c].finding);
        for (std::size_t a = 0; a < kFindingActionCount; ++a) {
            const double indicator = a == f ? 1.0 : 0.0;
            grad.finding_logit(e, category, static_cast<FindingAction>(a)) +=
                weight * (indicator - finding_p[a]);
        }
        const auto answer_p = params.answer_probs(e, category, actions[c].finding);
        const std::size_t chosen = static_cast<std::size_t>(actions[c].answer);
        for (std::size_t a = 0; a < kAnswerActionCount; ++a) {
            const double indicator = a == chosen ? 1.0 : 0.0;
            grad.answer_logit(e, category, actions[c].finding, static_cast<AnswerAction>(a)) +=
                weight * (indicator - answer_p[a]);
        }
    }
}

// Gradient of policy_kl(params || ref) at obs, scaled by `weight` and added
// to grad. Closed form for the factorized categorical chain.
void accumulate_kl_gradient(PolicyParams& grad, const PolicyParams& params,
                            const PolicyParams& ref, const Observation& obs, double weight) {
    if (weight == 0.0) return;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto p_find = params.finding_probs(e, category);
        const auto q_find = ref.finding_probs(e, category);

        // Per narrative action: its own log ratio plus the conditional
        // answer-head KL it carries.
        std::array<double, kFindingActionCount> per_action{};
        std::array<double, kFindingActionCount> answer_kl{};
        for (std::size_t f = 0; f < kFindingActionCount; ++f) {
            if (p_find[f] <= 0.0) continue;  // vanished mass contributes nothing
            const auto action = static_cast<FindingAction>(f);
            const auto p_ans = params.answer_probs(e, category, action);
            const auto q_ans = ref.answer_probs(e, category, action);
            answer_kl[f] = categorical_kl(p_ans, q_ans);
            per_action[f] = std::log(p_find[f]) - std::log(q_find[f]) + answer_kl[f];

            // Answer-head term: p(f) * p(a|f) * (log ratio(a|f) - KL(a|f)).
            for (std::size_t a = 0; a < kAnswerActionCount; ++a) {
                if (p_ans[a] <= 0.0) continue;
                const double log_ratio = std::log(p_ans[a]) - std::log(q_ans[a]);
                grad.answer_logit(e, category, action, static_cast<AnswerAction>(a)) +=
                    weight * p_find[f] * p_ans[a] * (log_ratio - answer_kl[f]);
            }
        }
        double expectation = 0.0;
        for (std::size_t f = 0; f < kFindingActionCount; ++f) {
            expectation += p_find[f] * per_action[f];
        }
        for (std::size_t f = 0; f < kFindingActionCount; ++f) {
            if (p_find[f] <= 0.0) continue;
            grad.finding_logit(e, category, static_cast<FindingAction>(f)) +=
                weight * p_find[f] * (per_action[f] - expectation);
        }
    }
}

}  // namespace

ObjectiveResult grpo_objective(const PolicyParams& params, const CandidateGroup& group,
                               const PolicyParams& ref_params, const TrainConfig& cfg) {
    const std::size_t n = group.candidates.size();
    if (n == 0) throw std::invalid_argument("grpo_objective: empty candidate group");
    ObjectiveResult result;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lo = 1.0 - cfg.clip_radius;
    const double hi = 1.0 + cfg.clip_radius;

    double surrogate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Candidate& candidate = group.candidates[i];
        const double logprob_cur =
            action_log_prob(params, group.observation, candidate.actions);
        const double ratio = std::exp(logprob_cur - candidate.logprob_old);
        const double advantage = candidate.advantage;
        if (!std::isfinite(ratio) || !std::isfinite(advantage)) {
            std::ostringstream msg;
            msg << "grpo_objective: non-finite intermediate at candidate " << i
                << " (ratio=" << ratio << ", advantage=" << advantage << ")";
            throw NumericalError(msg.str());
        }
        const double unclipped = ratio * advantage;
        const double clipped = std::clamp(ratio, lo, hi) * advantage;
        if (unclipped <= clipped) {
            surrogate += unclipped;
            // d(ratio * A)/dtheta = ratio * A * dlogpi/dtheta
            accumulate_score_gradient(result.gradient, params, group.observation,
                                      candidate.actions, inv_n * unclipped);
        } else {
            // Clipped branch selected: constant in theta, zero gradient.
            surrogate += clipped;
        }
    }
    surrogate *= inv_n;

    const double kl = policy_kl(params, ref_params, group.observation);
    if (!std::isfinite(kl)) throw NumericalError("grpo_objective: non-finite reference KL");
    accumulate_kl_gradient(result.gradient, params, ref_params, group.observation,
                           -cfg.kl_coefficient);
    result.value = surrogate - cfg.kl_coefficient * kl;
    if (!std::isfinite(result.value)) {
        throw NumericalError("grpo_objective: non-finite objective value");
    }
    return result;
}

PolicyParams warm_start(PolicyParams params, const std::vector<StudyRecord>& corpus, int epochs,
                        double learning_rate) {
    if (corpus.empty()) throw std::invalid_argument("warm_start: empty corpus");
    const double inv_n = 1.0 / static_cast<double>(corpus.size());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        PolicyParams grad;
        for (const auto& study : corpus) {
            accumulate_score_gradient(grad, params, study.observation,
                                      target_actions(study.labels), inv_n);
        }
        params.add_scaled(grad, learning_rate);
    }
    return params;
}

nlohmann::json TraceRow::to_json() const {
    nlohmann::json doc;
    doc["iteration"] = iteration;
    doc["reward_mean"] = reward_mean;
    doc["consistency_mean"] = consistency_mean;
    doc["think_accuracy_mean"] = think_accuracy_mean;
    doc["answer_accuracy_mean"] = answer_accuracy_mean;
    doc["semantic_mean"] = semantic_mean;
    doc["format_mean"] = format_mean;
    doc["kl"] = kl;
    doc["scs_macro"] = scs_macro;
    doc["scs_micro"] = scs_micro;
    return doc;
}

TrainResult train(const TrainConfig& cfg, const std::vector<StudyRecord>& corpus,
                  const CfsScoringMatrix& matrix, const LabelerLexicon& lexicon,
                  const GroupObserver& on_group) {
    auto problems = cfg.validate();
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid train config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
    if (corpus.empty()) throw std::invalid_argument("train: empty corpus");

    TrainResult result;
    result.warm_params = warm_start(PolicyParams(), corpus, cfg.warm_start_epochs,
                                    cfg.warm_start_learning_rate);
    PolicyParams params = result.warm_params;
    const PolicyParams& ref = result.warm_params;  // frozen reference

    RewardContext ctx;
    ctx.weights = cfg.weights;
    ctx.matrix = matrix;
    ctx.lexicon = lexicon;
    ctx.idf = build_idf(corpus);

    Rng rng(cfg.seed);
    result.trace.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int iteration = 1; iteration <= cfg.iterations; ++iteration) {
        const StudyRecord& study = corpus[rng.next_index(corpus.size())];
        const PolicyParams sampling_snapshot = params;
        CandidateGroup group =
            sample_group(sampling_snapshot, study.observation, cfg.group_size, rng);
        for (auto& candidate : group.candidates) {
            candidate.reward =
                total_reward(candidate.rendered, study.labels, study.findings_text, ctx);
            candidate.logprob_ref =
                action_log_prob(ref, study.observation, candidate.actions);
        }
        compute_advantages(group, cfg.advantage_epsilon);
        if (on_group) on_group(iteration, group);
        const ObjectiveResult objective = grpo_objective(params, group, ref, cfg);
        params.add_scaled(objective.gradient, cfg.learning_rate);

        TraceRow row;
        row.iteration = iteration;
        const double inv_g = 1.0 / static_cast<double>(group.candidates.size());
        std::vector<StructuredOutput> outputs;
        outputs.reserve(group.candidates.size());
        for (const auto& candidate : group.candidates) {
            row.reward_mean += candidate.reward.total * inv_g;
            row.consistency_mean += candidate.reward.consistency * inv_g;
            row.think_accuracy_mean += candidate.reward.think_accuracy * inv_g;
            row.answer_accuracy_mean += candidate.reward.answer_accuracy * inv_g;
            row.semantic_mean += candidate.reward.semantic * inv_g;
            row.format_mean += candidate.reward.format * inv_g;
            outputs.push_back(candidate.rendered);
        }
        row.kl = policy_kl(params, ref, study.observation);
        auto [scs_macro, scs_micro] = self_consistency(outputs, lexicon);
        row.scs_macro = scs_macro;
        row.scs_micro = scs_micro;
        result.trace.push_back(row);
    }
    result.final_params = std::move(params);
    return result;
}

}  // namespace reportrl

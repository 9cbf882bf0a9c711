#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "reportrl/errors.hpp"
#include "reportrl/grpo.hpp"
#include "reportrl/metrics.hpp"

using namespace reportrl;

namespace {

PolicyParams random_params(std::mt19937& rng, double scale = 1.0) {
    PolicyParams params;
    std::normal_distribution<double> gauss(0.0, scale);
    for (std::size_t i = 0; i < params.size(); ++i) *params.data_at(i) = gauss(rng);
    return params;
}

Observation random_observation(std::mt19937& rng) {
    Observation obs;
    for (auto& e : obs.evidence) e = static_cast<Evidence>(rng() % kEvidenceCount);
    return obs;
}

// A group sampled from separate old params, with synthetic rewards.
CandidateGroup random_group(std::mt19937& rng, const PolicyParams& old_params,
                            const Observation& obs, int G, double advantage_epsilon) {
    Rng sampler(rng());
    CandidateGroup group = sample_group(old_params, obs, G, sampler);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (auto& candidate : group.candidates) candidate.reward.total = unit(rng);
    compute_advantages(group, advantage_epsilon);
    return group;
}

CandidateGroup group_with_rewards(const PolicyParams& params, const Observation& obs,
                                  const std::vector<double>& rewards, double eps) {
    Rng sampler(7);
    CandidateGroup group = sample_group(params, obs, static_cast<int>(rewards.size()), sampler);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        group.candidates[i].reward.total = rewards[i];
    }
    compute_advantages(group, eps);
    return group;
}

std::vector<StudyRecord> toy_corpus(std::size_t n, double noise, std::uint64_t seed,
                                    double uncertain_rate = 0.05) {
    CorpusSpec spec;
    spec.n_studies = n;
    spec.seed = seed;
    spec.evidence_noise = noise;
    spec.default_rates.positive = 0.3;
    spec.default_rates.uncertain = uncertain_rate;
    return generate_corpus(spec);
}

double greedy_answer_accuracy(const PolicyParams& params,
                              const std::vector<StudyRecord>& corpus) {
    std::size_t correct = 0;
    std::size_t cells = 0;
    for (const auto& study : corpus) {
        ActionSet actions = greedy_actions(params, study.observation);
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            ++cells;
            correct += answer_action_value(actions[c].answer) == study.labels.values[c];
        }
    }
    return static_cast<double>(correct) / static_cast<double>(cells);
}

double mean_target_log_likelihood(const PolicyParams& params,
                                  const std::vector<StudyRecord>& corpus) {
    double total = 0.0;
    for (const auto& study : corpus) {
        total += action_log_prob(params, study.observation, target_actions(study.labels));
    }
    return total / static_cast<double>(corpus.size());
}

}  // namespace

TEST_CASE("groups are bit-identical under a fixed seed") {
    std::mt19937 gen(55);
    PolicyParams params = random_params(gen);
    Observation obs = random_observation(gen);
    Rng a(123);
    Rng b(123);
    CandidateGroup ga = sample_group(params, obs, 8, a);
    CandidateGroup gb = sample_group(params, obs, 8, b);
    REQUIRE(ga.candidates.size() == gb.candidates.size());
    for (std::size_t i = 0; i < ga.candidates.size(); ++i) {
        CHECK(ga.candidates[i].actions == gb.candidates[i].actions);
        CHECK(ga.candidates[i].logprob_old == gb.candidates[i].logprob_old);
        CHECK(ga.candidates[i].rendered.think_text == gb.candidates[i].rendered.think_text);
    }
}

TEST_CASE("uniform logits sample group actions uniformly within three sigma") {
    PolicyParams params;  // zero logits
    Observation obs;
    obs.evidence.fill(Evidence::Negative);
    Rng rng(31415);
    CandidateGroup group = sample_group(params, obs, 10000, rng);
    std::array<int, kFindingActionCount> counts{};
    for (const auto& candidate : group.candidates) {
        ++counts[static_cast<std::size_t>(candidate.actions[3].finding)];
    }
    const double n = 10000.0;
    const double p = 1.0 / kFindingActionCount;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int count : counts) {
        CHECK(std::abs(count - n * p) < 3.0 * sigma);
    }
}

TEST_CASE("advantages standardize rewards within the group") {
    std::mt19937 rng(1);
    PolicyParams params = random_params(rng);
    Observation obs = random_observation(rng);

    SUBCASE("fixture: rewards (0, 1) with zero epsilon") {
        auto group = group_with_rewards(params, obs, {0.0, 1.0}, 0.0);
        CHECK(group.candidates[0].advantage == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(group.candidates[1].advantage == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(group.reward_mean == doctest::Approx(0.5));
        CHECK(group.reward_std == doctest::Approx(0.5));
    }
    SUBCASE("equal rewards give exactly zero advantages") {
        auto group = group_with_rewards(params, obs, {0.7, 0.7, 0.7, 0.7}, 1e-4);
        for (const auto& candidate : group.candidates) CHECK(candidate.advantage == 0.0);
        auto degenerate = group_with_rewards(params, obs, {0.7, 0.7}, 0.0);
        for (const auto& candidate : degenerate.candidates) CHECK(candidate.advantage == 0.0);
    }
    SUBCASE("sum zero and unit population std over random groups") {
        for (int trial = 0; trial < 200; ++trial) {
            auto group = random_group(rng, params, obs, 2 + static_cast<int>(rng() % 6), 0.0);
            double sum = 0.0;
            double sq = 0.0;
            for (const auto& candidate : group.candidates) {
                sum += candidate.advantage;
                sq += candidate.advantage * candidate.advantage;
            }
            CHECK(std::abs(sum) < 1e-9);
            if (group.reward_std > 1e-9) {
                CHECK(std::abs(sq / group.candidates.size() - 1.0) < 1e-9);
            }
        }
    }
    SUBCASE("positive affine reward maps leave advantages unchanged") {
        std::uniform_real_distribution<double> unit(0.1, 3.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> rewards;
            for (int i = 0; i < 5; ++i) rewards.push_back(unit(rng));
            auto base = group_with_rewards(params, obs, rewards, 0.0);
            const double a = unit(rng);
            const double b = unit(rng) - 1.5;
            std::vector<double> mapped;
            for (double r : rewards) mapped.push_back(a * r + b);
            auto scaled = group_with_rewards(params, obs, mapped, 0.0);
            for (std::size_t i = 0; i < rewards.size(); ++i) {
                CHECK(scaled.candidates[i].advantage ==
                      doctest::Approx(base.candidates[i].advantage).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("categorical and policy KL") {
    SUBCASE("deterministic vs half-half two-way head") {
        const double p[] = {1.0, 0.0};
        const double q[] = {0.5, 0.5};
        CHECK(categorical_kl(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("zero at identity, exactly") {
        std::mt19937 rng(4);
        PolicyParams params = random_params(rng);
        Observation obs = random_observation(rng);
        CHECK(policy_kl(params, params, obs) == 0.0);
    }
    SUBCASE("non-negative on random pairs") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 300; ++trial) {
            PolicyParams p = random_params(rng, 2.0);
            PolicyParams q = random_params(rng, 2.0);
            Observation obs = random_observation(rng);
            CHECK(policy_kl(p, q, obs) >= -1e-12);
        }
    }
    SUBCASE("deterministic narrative head vs uniform reference") {
        PolicyParams p;
        for (std::size_t e = 0; e < kEvidenceCount; ++e) {
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                p.finding_logit(static_cast<Evidence>(e), static_cast<Category>(c),
                                FindingAction::Omit) = 60.0;  // saturates the softmax
            }
        }
        PolicyParams uniform;
        Observation obs;
        obs.evidence.fill(Evidence::Positive);
        // narrative heads contribute log 4 each; answer heads are uniform on
        // both sides and contribute nothing
        CHECK(policy_kl(p, uniform, obs) ==
              doctest::Approx(kCategoryCount * std::log(4.0)).epsilon(1e-9));
    }
}

TEST_CASE("objective value fixtures") {
    std::mt19937 rng(6);
    PolicyParams params = random_params(rng);
    Observation obs = random_observation(rng);
    TrainConfig cfg;

    SUBCASE("identity policies give value zero") {
        auto group = group_with_rewards(params, obs, {0.1, 0.9, 0.4, 0.6}, 1e-4);
        auto result = grpo_objective(params, group, params, cfg);
        CHECK(std::abs(result.value) < 1e-9);
        for (const auto& candidate : group.candidates) {
            CHECK(candidate.logprob_cur == candidate.logprob_old);  // ratio identity
        }
    }
    SUBCASE("hand-set ratios and advantages reproduce the clipped arithmetic") {
        auto group = group_with_rewards(params, obs, {0.0, 1.0}, 0.0);
        // force ratios 0.5 and 1.5 by shifting the stored sampling logprobs
        group.candidates[0].advantage = -1.0;
        group.candidates[1].advantage = 1.0;
        group.candidates[0].logprob_old =
            action_log_prob(params, obs, group.candidates[0].actions) - std::log(0.5);
        group.candidates[1].logprob_old =
            action_log_prob(params, obs, group.candidates[1].actions) - std::log(1.5);
        TrainConfig no_kl = cfg;
        no_kl.kl_coefficient = 0.0;
        auto result = grpo_objective(params, group, params, no_kl);
        // 0.5 * (min(0.5*-1, 0.8*-1) + min(1.5*1, 1.2*1)) = 0.2
        CHECK(result.value == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("value matches an independent min-semantics replica") {
        for (int trial = 0; trial < 100; ++trial) {
            PolicyParams cur = random_params(rng);
            PolicyParams old_params = random_params(rng);
            Observation o = random_observation(rng);
            auto group = random_group(rng, old_params, o, 4, 1e-4);
            TrainConfig no_kl = cfg;
            no_kl.kl_coefficient = 0.0;
            auto result = grpo_objective(cur, group, cur, no_kl);
            double replica = 0.0;
            for (const auto& candidate : group.candidates) {
                const double ratio = std::exp(action_log_prob(cur, o, candidate.actions) -
                                              candidate.logprob_old);
                const double unclipped = ratio * candidate.advantage;
                const double clipped =
                    std::clamp(ratio, 1.0 - no_kl.clip_radius, 1.0 + no_kl.clip_radius) *
                    candidate.advantage;
                CHECK(std::min(unclipped, clipped) <= unclipped + 1e-15);  // clip dominance
                replica += std::min(unclipped, clipped);
            }
            replica /= static_cast<double>(group.candidates.size());
            CHECK(result.value == doctest::Approx(replica).epsilon(1e-12));
        }
    }
    SUBCASE("non-finite inputs raise NumericalError naming the candidate") {
        auto group = group_with_rewards(params, obs, {0.0, 1.0}, 1e-4);
        group.candidates[1].logprob_old = -INFINITY;
        CHECK_THROWS_WITH_AS((void)grpo_objective(params, group, params, cfg),
                             doctest::Contains("candidate 1"), NumericalError);
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937 rng(8);
    TrainConfig cfg;
    const double h = 1e-5;
    double worst = 0.0;
    for (int instance = 0; instance < 10; ++instance) {
        PolicyParams params = random_params(rng, 0.8);
        PolicyParams ref = random_params(rng, 0.8);
        PolicyParams old_params = random_params(rng, 0.8);
        Observation obs = random_observation(rng);
        auto group = random_group(rng, old_params, obs, 3, 1e-4);

        auto result = grpo_objective(params, group, ref, cfg);
        for (std::size_t j = 0; j < params.size(); ++j) {
            PolicyParams plus = params;
            *plus.data_at(j) += h;
            PolicyParams minus = params;
            *minus.data_at(j) -= h;
            const double fd = (grpo_objective(plus, group, ref, cfg).value -
                               grpo_objective(minus, group, ref, cfg).value) /
                              (2.0 * h);
            const double analytic = result.gradient.value_at(j);
            const double rel = std::abs(fd - analytic) /
                               std::max({1.0, std::abs(fd), std::abs(analytic)});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("gradient is invariant under positive affine reward maps") {
    std::mt19937 rng(10);
    TrainConfig cfg;
    cfg.advantage_epsilon = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PolicyParams params = random_params(rng);
        PolicyParams ref = random_params(rng);
        Observation obs = random_observation(rng);
        std::uniform_real_distribution<double> unit(0.1, 2.0);
        std::vector<double> rewards;
        for (int i = 0; i < 6; ++i) rewards.push_back(unit(rng));

        auto base = group_with_rewards(params, obs, rewards, 0.0);
        std::vector<double> mapped;
        const double a = unit(rng);
        const double b = unit(rng) - 1.0;
        for (double r : rewards) mapped.push_back(a * r + b);
        auto scaled = group_with_rewards(params, obs, mapped, 0.0);

        auto g1 = grpo_objective(params, base, ref, cfg);
        auto g2 = grpo_objective(params, scaled, ref, cfg);
        for (std::size_t j = 0; j < params.size(); ++j) {
            CHECK(g1.gradient.value_at(j) ==
                  doctest::Approx(g2.gradient.value_at(j)).epsilon(1e-9));
        }
    }
}

TEST_CASE("equal rewards give a zero surrogate update") {
    std::mt19937 rng(12);
    TrainConfig cfg;
    cfg.kl_coefficient = 0.0;  // isolate the surrogate term
    for (int trial = 0; trial < 50; ++trial) {
        PolicyParams params = random_params(rng);
        Observation obs = random_observation(rng);
        auto group = group_with_rewards(params, obs, {0.3, 0.3, 0.3, 0.3, 0.3}, 1e-4);
        auto result = grpo_objective(params, group, params, cfg);
        CHECK(result.value == 0.0);
        for (std::size_t j = 0; j < params.size(); ++j) {
            CHECK(result.gradient.value_at(j) == 0.0);
        }
    }
}

TEST_CASE("warm start") {
    SUBCASE("rejects an empty corpus") {
        CHECK_THROWS_AS((void)warm_start(PolicyParams(), {}, 1, 1.0), std::invalid_argument);
    }
    SUBCASE("zero epochs return the params unchanged") {
        auto corpus = toy_corpus(20, 0.0, 3);
        PolicyParams params;
        CHECK(warm_start(params, corpus, 0, 1.0) == params);
    }
    SUBCASE("noise-free evidence is fit to full greedy accuracy") {
        auto corpus = toy_corpus(200, 0.0, 9);
        PolicyParams fitted = warm_start(PolicyParams(), corpus, 200, 2.0);
        CHECK(greedy_answer_accuracy(fitted, corpus) == doctest::Approx(1.0));
    }
    SUBCASE("held-out likelihood is monotone under full-batch ascent") {
        auto corpus = toy_corpus(160, 0.0, 11);
        std::vector<StudyRecord> train_half(corpus.begin(), corpus.begin() + 80);
        std::vector<StudyRecord> held_out(corpus.begin() + 80, corpus.end());
        PolicyParams params;
        double previous = mean_target_log_likelihood(params, held_out);
        for (int epoch = 0; epoch < 60; ++epoch) {
            params = warm_start(std::move(params), train_half, 1, 0.5);
            const double current = mean_target_log_likelihood(params, held_out);
            CHECK(current >= previous - 1e-9);
            previous = current;
        }
    }
}

TEST_CASE("training runs are deterministic under the seed") {
    auto corpus = toy_corpus(50, 0.1, 21);
    TrainConfig cfg;
    cfg.iterations = 40;
    cfg.warm_start_epochs = 50;
    cfg.seed = 9;
    auto a = train(cfg, corpus);
    auto b = train(cfg, corpus);
    CHECK(a.final_params == b.final_params);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].to_json().dump() == b.trace[i].to_json().dump());
    }
}

TEST_CASE("a huge KL coefficient pins the policy to the reference") {
    auto corpus = toy_corpus(60, 0.1, 23);
    TrainConfig cfg;
    cfg.iterations = 300;
    cfg.kl_coefficient = 1e6;
    cfg.learning_rate = 5e-6;  // step scaled down for the stiff KL pull
    auto result = train(cfg, corpus);
    for (const auto& study : corpus) {
        CHECK(policy_kl(result.final_params, result.warm_params, study.observation) <= 1e-3);
    }
}

TEST_CASE("answer-accuracy-only reward solves the noise-free bandit from scratch") {
    // strict maximality of the correct answer, by brute-force enumeration
    CfsScoringMatrix matrix;
    for (LabelValue truth : {LabelValue::Positive, LabelValue::Negative}) {
        const double correct = matrix.score(truth, truth);
        for (auto action : {AnswerAction::Positive, AnswerAction::Negative,
                            AnswerAction::Uncertain}) {
            if (answer_action_value(action) == truth) continue;
            CHECK(matrix.score(truth, answer_action_value(action)) < correct);
        }
    }

    auto corpus = toy_corpus(200, 0.0, 31, /*uncertain_rate=*/0.0);
    TrainConfig cfg;
    cfg.weights = RewardWeights{0.0, 0.0, 1.0, 0.0, 0.0};
    cfg.iterations = 500;
    cfg.warm_start_epochs = 0;  // cold start: uniform policy
    cfg.seed = 17;
    auto result = train(cfg, corpus);
    CHECK(greedy_answer_accuracy(result.final_params, corpus) >= 0.95);
}

TEST_CASE("training trace records reward components and self-consistency") {
    auto corpus = toy_corpus(40, 0.0, 41);
    TrainConfig cfg;
    cfg.iterations = 5;
    cfg.warm_start_epochs = 30;
    auto result = train(cfg, corpus);
    REQUIRE(result.trace.size() == 5);
    for (const auto& row : result.trace) {
        CHECK(row.iteration >= 1);
        CHECK(row.format_mean == doctest::Approx(1.0));  // rendered candidates always comply
        CHECK(row.kl >= 0.0);
        CHECK(row.scs_micro >= 0.0);
        CHECK(row.scs_micro <= 1.0);
        auto doc = row.to_json();
        CHECK(doc.contains("reward_mean"));
        CHECK(doc.contains("kl"));
    }
}

TEST_CASE("train rejects invalid configs with every violation listed") {
    auto corpus = toy_corpus(10, 0.0, 51);
    TrainConfig cfg;
    cfg.group_size = 1;
    cfg.clip_radius = 2.0;
    cfg.learning_rate = -1.0;
    try {
        (void)train(cfg, corpus);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string message = e.what();
        CHECK(message.find("group_size") != std::string::npos);
        CHECK(message.find("clip_radius") != std::string::npos);
        CHECK(message.find("learning_rate") != std::string::npos);
    }
}

#include "reportrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "reportrl/errors.hpp"

namespace reportrl {

namespace {

constexpr std::size_t kFindingSize = kEvidenceCount * kCategoryCount * kFindingActionCount;
constexpr std::size_t kAnswerSize =
    kEvidenceCount * kCategoryCount * kFindingActionCount * kAnswerActionCount;

std::size_t finding_index(Evidence e, Category c, FindingAction a) {
    return (static_cast<std::size_t>(e) * kCategoryCount + static_cast<std::size_t>(c)) *
               kFindingActionCount +
           static_cast<std::size_t>(a);
}

std::size_t answer_index(Evidence e, Category c, FindingAction f, AnswerAction a) {
    return ((static_cast<std::size_t>(e) * kCategoryCount + static_cast<std::size_t>(c)) *
                kFindingActionCount +
            static_cast<std::size_t>(f)) *
               kAnswerActionCount +
           static_cast<std::size_t>(a);
}

template <std::size_t N>
std::array<double, N> log_softmax(const std::array<double, N>& logits) {
    const double max = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - max);
    const double log_norm = max + std::log(sum);
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = logits[i] - log_norm;
    return out;
}

template <std::size_t N>
std::array<double, N> softmax(const std::array<double, N>& logits) {
    auto out = log_softmax(logits);
    for (double& v : out) v = std::exp(v);
    return out;
}

template <std::size_t N>
std::size_t argmax(const std::array<double, N>& values) {
    return static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

LabelValue answer_action_value(AnswerAction a) {
    switch (a) {
        case AnswerAction::Positive: return LabelValue::Positive;
        case AnswerAction::Negative: return LabelValue::Negative;
        case AnswerAction::Uncertain: return LabelValue::Uncertain;
    }
    return LabelValue::Negative;
}

AnswerAction answer_action_for(LabelValue v) {
    switch (v) {
        case LabelValue::Positive: return AnswerAction::Positive;
        case LabelValue::Negative: return AnswerAction::Negative;
        case LabelValue::Uncertain: return AnswerAction::Uncertain;
    }
    return AnswerAction::Negative;
}

PolicyParams::PolicyParams() : finding_(kFindingSize, 0.0), answer_(kAnswerSize, 0.0) {}

double PolicyParams::finding_logit(Evidence e, Category c, FindingAction a) const {
    return finding_[finding_index(e, c, a)];
}

double& PolicyParams::finding_logit(Evidence e, Category c, FindingAction a) {
    return finding_[finding_index(e, c, a)];
}

double PolicyParams::answer_logit(Evidence e, Category c, FindingAction f, AnswerAction a) const {
    return answer_[answer_index(e, c, f, a)];
}

double& PolicyParams::answer_logit(Evidence e, Category c, FindingAction f, AnswerAction a) {
    return answer_[answer_index(e, c, f, a)];
}

std::array<double, kFindingActionCount> PolicyParams::finding_probs(Evidence e,
                                                                    Category c) const {
    std::array<double, kFindingActionCount> logits;
    for (std::size_t a = 0; a < kFindingActionCount; ++a) {
        logits[a] = finding_logit(e, c, static_cast<FindingAction>(a));
    }
    return softmax(logits);
}

std::array<double, kFindingActionCount> PolicyParams::finding_log_probs(Evidence e,
                                                                        Category c) const {
    std::array<double, kFindingActionCount> logits;
    for (std::size_t a = 0; a < kFindingActionCount; ++a) {
        logits[a] = finding_logit(e, c, static_cast<FindingAction>(a));
    }
    return log_softmax(logits);
}

std::array<double, kAnswerActionCount> PolicyParams::answer_probs(Evidence e, Category c,
                                                                  FindingAction f) const {
    std::array<double, kAnswerActionCount> logits;
    for (std::size_t a = 0; a < kAnswerActionCount; ++a) {
        logits[a] = answer_logit(e, c, f, static_cast<AnswerAction>(a));
    }
    return softmax(logits);
}

std::array<double, kAnswerActionCount> PolicyParams::answer_log_probs(Evidence e, Category c,
                                                                      FindingAction f) const {
    std::array<double, kAnswerActionCount> logits;
    for (std::size_t a = 0; a < kAnswerActionCount; ++a) {
        logits[a] = answer_logit(e, c, f, static_cast<AnswerAction>(a));
    }
    return log_softmax(logits);
}

double* PolicyParams::data_at(std::size_t flat_index) {
    if (flat_index < finding_.size()) return &finding_[flat_index];
    return &answer_[flat_index - finding_.size()];
}

double PolicyParams::value_at(std::size_t flat_index) const {
    if (flat_index < finding_.size()) return finding_[flat_index];
    return answer_[flat_index - finding_.size()];
}

void PolicyParams::fill(double value) {
    std::fill(finding_.begin(), finding_.end(), value);
    std::fill(answer_.begin(), answer_.end(), value);
}

void PolicyParams::add_scaled(const PolicyParams& other, double scale) {
    for (std::size_t i = 0; i < finding_.size(); ++i) finding_[i] += scale * other.finding_[i];
    for (std::size_t i = 0; i < answer_.size(); ++i) answer_[i] += scale * other.answer_[i];
}

std::string PolicyParams::to_json_text() const {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["finding_shape"] = {kEvidenceCount, kCategoryCount, kFindingActionCount};
    doc["answer_shape"] = {kEvidenceCount, kCategoryCount, kFindingActionCount,
                           kAnswerActionCount};
    doc["finding_logits"] = finding_;
    doc["answer_logits"] = answer_;
    return doc.dump();
}

PolicyParams PolicyParams::from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("finding_logits") ||
        !doc.contains("answer_logits")) {
        throw DataError("policy checkpoint: malformed JSON");
    }
    PolicyParams params;
    auto finding = doc["finding_logits"].get<std::vector<double>>();
    auto answer = doc["answer_logits"].get<std::vector<double>>();
    if (finding.size() != kFindingSize || answer.size() != kAnswerSize) {
        throw DataError("policy checkpoint: tensor sizes do not match the policy shape");
    }
    params.finding_ = std::move(finding);
    params.answer_ = std::move(answer);
    return params;
}

PolicyParams PolicyParams::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open policy checkpoint: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

void PolicyParams::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out << to_json_text() << '\n';
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

double action_log_prob(const PolicyParams& params, const Observation& obs,
                       const ActionSet& actions) {
    double total = 0.0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto finding_lp = params.finding_log_probs(e, category);
        const auto answer_lp = params.answer_log_probs(e, category, actions[c].finding);
        total += finding_lp[static_cast<std::size_t>(actions[c].finding)];
        total += answer_lp[static_cast<std::size_t>(actions[c].answer)];
    }
    return total;
}

ActionSet sample_actions(const PolicyParams& params, const Observation& obs, Rng& rng) {
    ActionSet actions;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto finding_p = params.finding_probs(e, category);
        const auto finding = static_cast<FindingAction>(rng.categorical(finding_p));
        const auto answer_p = params.answer_probs(e, category, finding);
        const auto answer = static_cast<AnswerAction>(rng.categorical(answer_p));
        actions[c] = {finding, answer};
    }
    return actions;
}

ActionSet greedy_actions(const PolicyParams& params, const Observation& obs) {
    ActionSet actions;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        const Evidence e = obs.evidence[c];
        const auto finding = static_cast<FindingAction>(argmax(params.finding_probs(e, category)));
        const auto answer =
            static_cast<AnswerAction>(argmax(params.answer_probs(e, category, finding)));
        actions[c] = {finding, answer};
    }
    return actions;
}

std::string render_think(const ActionSet& actions) {
    std::string think;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const auto category = static_cast<Category>(c);
        MentionKind kind;
        switch (actions[c].finding) {
            case FindingAction::AssertPositive: kind = MentionKind::AssertPositive; break;
            case FindingAction::AssertNegative: kind = MentionKind::AssertNegative; break;
            case FindingAction::AssertUncertain: kind = MentionKind::AssertUncertain; break;
            case FindingAction::Omit: continue;
        }
        const std::string& sentence = template_sentence(category, kind);
        if (sentence.empty()) continue;  // vacuous No Finding slots
        if (!think.empty()) think += ' ';
        think += sentence;
    }
    if (think.empty()) think = empty_findings_sentence();
    return think;
}

LabelVector answer_labels_of(const ActionSet& actions) {
    LabelVector labels = make_label_vector(LabelValue::Negative, Provenance::AnswerBlock);
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        labels.values[c] = answer_action_value(actions[c].answer);
    }
    return labels;
}

StructuredOutput render_candidate(const ActionSet& actions) {
    return parse_output(render_output(render_think(actions), answer_labels_of(actions)));
}

ActionSet target_actions(const LabelVector& labels) {
    ActionSet actions;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        CategoryActions a;
        switch (labels.values[c]) {
            case LabelValue::Positive:
                a.finding = FindingAction::AssertPositive;
                a.answer = AnswerAction::Positive;
                break;
            case LabelValue::Negative:
                a.finding = FindingAction::Omit;
                a.answer = AnswerAction::Negative;
                break;
            case LabelValue::Uncertain:
                a.finding = FindingAction::AssertUncertain;
                a.answer = AnswerAction::Uncertain;
                break;
        }
        actions[c] = a;
    }
    return actions;
}

}  // namespace reportrl

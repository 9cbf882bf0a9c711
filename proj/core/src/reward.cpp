#include "reportrl/reward.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace reportrl {

namespace {

constexpr double kMatrixMin = -0.3;
constexpr double kMatrixMax = 2.0;

std::size_t row_of(LabelValue gt) {
    switch (gt) {
        case LabelValue::Positive: return 0;
        case LabelValue::Negative: return 1;
        case LabelValue::Uncertain: return 2;
    }
    return 0;
}

std::size_t col_of(std::optional<LabelValue> pred) {
    if (!pred) return 3;
    switch (*pred) {
        case LabelValue::Positive: return 0;
        case LabelValue::Negative: return 1;
        case LabelValue::Uncertain: return 2;
    }
    return 3;
}

const char* row_key(std::size_t row) {
    switch (row) {
        case 0: return "positive";
        case 1: return "negative";
        default: return "uncertain";
    }
}

const char* col_key(std::size_t col) {
    switch (col) {
        case 0: return "positive";
        case 1: return "negative";
        case 2: return "uncertain";
        default: return "missing";
    }
}

}  // namespace

PartialLabels partial_from_labels(const LabelVector& v) {
    PartialLabels out;
    for (std::size_t i = 0; i < kCategoryCount; ++i) out[i] = v.values[i];
    return out;
}

PartialLabels partial_all_missing() { return PartialLabels{}; }

CfsScoringMatrix::CfsScoringMatrix() {
    // ground truth Positive
    entries_[0] = {2.0, -0.3, 0.0, 0.0};
    // ground truth Negative
    entries_[1] = {-0.3, 1.0, 0.0, 0.0};
    // ground truth Uncertain: neutral no matter the prediction
    entries_[2] = {0.5, 0.5, 0.5, 0.5};
}

double CfsScoringMatrix::score(LabelValue ground_truth, std::optional<LabelValue> predicted) const {
    return entries_[row_of(ground_truth)][col_of(predicted)];
}

void CfsScoringMatrix::set(LabelValue ground_truth, std::optional<LabelValue> predicted,
                           double value) {
    if (value < kMatrixMin || value > kMatrixMax) {
        throw std::invalid_argument("scoring matrix entry out of [-0.3, 2.0]");
    }
    entries_[row_of(ground_truth)][col_of(predicted)] = value;
}

CfsScoringMatrix CfsScoringMatrix::from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::runtime_error("scoring matrix: not a JSON object");
    }
    CfsScoringMatrix matrix;
    std::vector<std::string> problems;
    for (std::size_t row = 0; row < 3; ++row) {
        if (!doc.contains(row_key(row))) {
            problems.push_back(std::string("missing row \"") + row_key(row) + "\"");
            continue;
        }
        const auto& row_obj = doc[row_key(row)];
        for (std::size_t col = 0; col < 4; ++col) {
            if (!row_obj.contains(col_key(col)) || !row_obj[col_key(col)].is_number()) {
                problems.push_back(std::string("missing entry ") + row_key(row) + "." +
                                   col_key(col));
                continue;
            }
            const double value = row_obj[col_key(col)].get<double>();
            if (value < kMatrixMin || value > kMatrixMax) {
                std::ostringstream msg;
                msg << "entry " << row_key(row) << "." << col_key(col) << " = " << value
                    << " outside [-0.3, 2.0]";
                problems.push_back(msg.str());
                continue;
            }
            matrix.entries_[row][col] = value;
        }
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid scoring matrix:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw std::runtime_error(msg.str());
    }
    return matrix;
}

CfsScoringMatrix CfsScoringMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scoring matrix file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string CfsScoringMatrix::to_json_text() const {
    nlohmann::json doc;
    for (std::size_t row = 0; row < 3; ++row) {
        for (std::size_t col = 0; col < 4; ++col) {
            doc[row_key(row)][col_key(col)] = entries_[row][col];
        }
    }
    return doc.dump(2);
}

RewardWeights RewardWeights::from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::runtime_error("reward weights: not a JSON object");
    }
    RewardWeights w;
    std::vector<std::string> problems;
    auto read = [&](const char* key, double& dst) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number()) {
            problems.push_back(std::string("\"") + key + "\" is not a number");
            return;
        }
        dst = doc[key].get<double>();
        if (dst < 0.0) problems.push_back(std::string("\"") + key + "\" is negative");
    };
    read("consistency", w.consistency);
    read("think_accuracy", w.think_accuracy);
    read("answer_accuracy", w.answer_accuracy);
    read("semantic", w.semantic);
    read("format", w.format);
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid reward weights:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw std::runtime_error(msg.str());
    }
    return w;
}

RewardWeights RewardWeights::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reward weights file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string RewardWeights::to_json_text() const {
    nlohmann::json doc;
    doc["consistency"] = consistency;
    doc["think_accuracy"] = think_accuracy;
    doc["answer_accuracy"] = answer_accuracy;
    doc["semantic"] = semantic;
    doc["format"] = format;
    return doc.dump(2);
}

double cfs(const PartialLabels& predicted, const LabelVector& truth,
           const CfsScoringMatrix& matrix, std::array<double, kCategoryCount>& terms_out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        terms_out[i] = matrix.score(truth.values[i], predicted[i]);
        sum += terms_out[i];
    }
    return sum / static_cast<double>(kCategoryCount);
}

double cfs(const PartialLabels& predicted, const LabelVector& truth,
           const CfsScoringMatrix& matrix) {
    std::array<double, kCategoryCount> terms{};
    return cfs(predicted, truth, matrix, terms);
}

double consistency_reward(const StructuredOutput& out, const LabelerLexicon& lexicon,
                          const CfsScoringMatrix& matrix) {
    std::array<double, kCategoryCount> terms{};
    const LabelVector think_labels = extract_labels(out.think_text, lexicon);
    const PartialLabels answer = out.answer_labels ? partial_from_labels(*out.answer_labels)
                                                   : partial_all_missing();
    return cfs(answer, think_labels, matrix, terms);
}

double think_accuracy_reward(const StructuredOutput& out, const LabelVector& truth,
                             const LabelerLexicon& lexicon, const CfsScoringMatrix& matrix) {
    const LabelVector think_labels = extract_labels(out.think_text, lexicon);
    return cfs(partial_from_labels(think_labels), truth, matrix);
}

double answer_accuracy_reward(const StructuredOutput& out, const LabelVector& truth,
                              const CfsScoringMatrix& matrix) {
    const PartialLabels answer = out.answer_labels ? partial_from_labels(*out.answer_labels)
                                                   : partial_all_missing();
    return cfs(answer, truth, matrix);
}

double semantic_reward(const std::string& think, const std::string& reference,
                       const IdfTable& idf) {
    const auto cand_tokens = tokenize(think);
    const auto ref_tokens = tokenize(reference);
    if (cand_tokens.empty() || ref_tokens.empty()) return 0.0;

    std::unordered_map<std::string, std::size_t> cand_counts;
    std::unordered_map<std::string, std::size_t> ref_counts;
    for (const auto& t : cand_tokens) ++cand_counts[t];
    for (const auto& t : ref_tokens) ++ref_counts[t];

    // One-to-one alignment with an exact-match kernel: per token type the
    // best alignment matches min(candidate count, reference count).
    double matched_weight = 0.0;
    double cand_weight = 0.0;
    double ref_weight = 0.0;
    for (const auto& [token, count] : cand_counts) {
        const double w = idf.idf(token);
        cand_weight += w * static_cast<double>(count);
        auto it = ref_counts.find(token);
        if (it != ref_counts.end()) {
            matched_weight += w * static_cast<double>(std::min(count, it->second));
        }
    }
    for (const auto& [token, count] : ref_counts) {
        ref_weight += idf.idf(token) * static_cast<double>(count);
    }
    if (cand_weight <= 0.0 || ref_weight <= 0.0) return 0.0;
    const double precision = matched_weight / cand_weight;
    const double recall = matched_weight / ref_weight;
    if (precision + recall <= 0.0) return 0.0;
    const double f1 = 2.0 * precision * recall / (precision + recall);
    return std::clamp(f1, 0.0, 1.0);
}

double format_reward(const FormatFlags& flags) {
    return 0.5 * (flags.tags_present ? 1.0 : 0.0) + 0.5 * (flags.json_valid ? 1.0 : 0.0);
}

RewardBreakdown total_reward(const StructuredOutput& out, const LabelVector& truth_labels,
                             const std::string& truth_text, const RewardContext& ctx) {
    RewardBreakdown b;
    const LabelVector think_labels = extract_labels(out.think_text, ctx.lexicon);
    const PartialLabels answer = out.answer_labels ? partial_from_labels(*out.answer_labels)
                                                   : partial_all_missing();

    b.consistency = cfs(answer, think_labels, ctx.matrix, b.consistency_terms);
    b.think_accuracy =
        cfs(partial_from_labels(think_labels), truth_labels, ctx.matrix, b.think_accuracy_terms);
    b.answer_accuracy = cfs(answer, truth_labels, ctx.matrix, b.answer_accuracy_terms);
    b.semantic = semantic_reward(out.think_text, truth_text, ctx.idf);
    b.format = format_reward(out.flags);
    b.total = ctx.weights.consistency * b.consistency +
              ctx.weights.think_accuracy * b.think_accuracy +
              ctx.weights.answer_accuracy * b.answer_accuracy +
              ctx.weights.semantic * b.semantic + ctx.weights.format * b.format;
    return b;
}

}  // namespace reportrl

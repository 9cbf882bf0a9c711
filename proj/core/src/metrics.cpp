#include "reportrl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "reportrl/tokenize.hpp"

namespace reportrl {

namespace {

// Clipped n-gram matches and candidate n-gram total for one order.
std::pair<long long, long long> ngram_counts(const std::vector<std::string>& candidate,
                                             const std::vector<std::string>& reference,
                                             std::size_t n) {
    if (candidate.size() < n) return {0, 0};
    auto collect = [n](const std::vector<std::string>& tokens) {
        std::map<std::vector<std::string>, long long> counts;
        if (tokens.size() >= n) {
            for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
                std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
                ++counts[std::move(gram)];
            }
        }
        return counts;
    };
    const auto cand_grams = collect(candidate);
    const auto ref_grams = collect(reference);
    long long matched = 0;
    long long total = 0;
    for (const auto& [gram, count] : cand_grams) {
        total += count;
        auto it = ref_grams.find(gram);
        if (it != ref_grams.end()) matched += std::min(count, it->second);
    }
    return {matched, total};
}

double bleu_from_counts(const std::array<long long, 4>& matched,
                        const std::array<long long, 4>& total, long long cand_len,
                        long long ref_len, int n) {
    if (cand_len == 0) return 0.0;
    double log_precision_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (total[k] == 0 || matched[k] == 0) return 0.0;
        log_precision_sum += std::log(static_cast<double>(matched[k]) / total[k]);
    }
    const double geo_mean = std::exp(log_precision_sum / n);
    const double brevity = cand_len >= ref_len
                               ? 1.0
                               : std::exp(1.0 - static_cast<double>(ref_len) / cand_len);
    return brevity * geo_mean;
}

bool is_positive(LabelValue v, UncertainPolicy policy) {
    if (v == LabelValue::Positive) return true;
    return policy == UncertainPolicy::Positive && v == LabelValue::Uncertain;
}

}  // namespace

double bleu_n(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              int n) {
    if (n < 1 || n > 4) throw std::invalid_argument("bleu_n: n must be in 1..4");
    std::array<long long, 4> matched{};
    std::array<long long, 4> total{};
    for (int k = 1; k <= n; ++k) {
        auto [m, t] = ngram_counts(candidate, reference, static_cast<std::size_t>(k));
        matched[k - 1] = m;
        total[k - 1] = t;
    }
    return bleu_from_counts(matched, total, static_cast<long long>(candidate.size()),
                            static_cast<long long>(reference.size()), n);
}

void BleuAccumulator::add(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference) {
    for (int k = 1; k <= 4; ++k) {
        auto [m, t] = ngram_counts(candidate, reference, static_cast<std::size_t>(k));
        matched_[k - 1] += m;
        total_[k - 1] += t;
    }
    candidate_length_ += static_cast<long long>(candidate.size());
    reference_length_ += static_cast<long long>(reference.size());
}

double BleuAccumulator::score(int n) const {
    if (n < 1 || n > 4) throw std::invalid_argument("BleuAccumulator: n must be in 1..4");
    return bleu_from_counts(matched_, total_, candidate_length_, reference_length_, n);
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const std::size_t rows = candidate.size();
    const std::size_t cols = reference.size();
    std::vector<std::size_t> prev(cols + 1, 0);
    std::vector<std::size_t> current(cols + 1, 0);
    for (std::size_t i = 1; i <= rows; ++i) {
        for (std::size_t j = 1; j <= cols; ++j) {
            if (candidate[i - 1] == reference[j - 1]) {
                current[j] = prev[j - 1] + 1;
            } else {
                current[j] = std::max(prev[j], current[j - 1]);
            }
        }
        std::swap(prev, current);
    }
    const double lcs = static_cast<double>(prev[cols]);
    if (lcs == 0.0) return 0.0;
    const double precision = lcs / static_cast<double>(rows);
    const double recall = lcs / static_cast<double>(cols);
    return 2.0 * precision * recall / (precision + recall);
}

double multilabel_f1(const std::vector<LabelVector>& preds, const std::vector<LabelVector>& truths,
                     F1Mode mode, UncertainPolicy policy) {
    if (preds.size() != truths.size()) {
        throw std::invalid_argument("multilabel_f1: prediction/truth length mismatch");
    }
    std::array<long long, kCategoryCount> tp{};
    std::array<long long, kCategoryCount> fp{};
    std::array<long long, kCategoryCount> fn{};
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            const bool p = is_positive(preds[i].values[c], policy);
            const bool t = is_positive(truths[i].values[c], policy);
            if (p && t) ++tp[c];
            else if (p && !t) ++fp[c];
            else if (!p && t) ++fn[c];
        }
    }
    if (mode == F1Mode::Micro) {
        long long tp_sum = 0;
        long long fp_sum = 0;
        long long fn_sum = 0;
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            tp_sum += tp[c];
            fp_sum += fp[c];
            fn_sum += fn[c];
        }
        const long long denom = 2 * tp_sum + fp_sum + fn_sum;
        if (denom == 0) return 1.0;  // no positives anywhere: vacuous agreement
        return 2.0 * static_cast<double>(tp_sum) / static_cast<double>(denom);
    }
    double f1_sum = 0.0;
    std::size_t active = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const long long denom = 2 * tp[c] + fp[c] + fn[c];
        if (denom == 0) continue;  // no support for this category: skipped
        f1_sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
        ++active;
    }
    if (active == 0) return 1.0;
    return f1_sum / static_cast<double>(active);
}

std::pair<double, double> self_consistency(const std::vector<StructuredOutput>& outputs,
                                           const LabelerLexicon& lexicon) {
    std::vector<LabelVector> truths;
    std::vector<LabelVector> preds;
    truths.reserve(outputs.size());
    preds.reserve(outputs.size());
    for (const auto& out : outputs) {
        truths.push_back(extract_labels(out.think_text, lexicon));
        preds.push_back(out.answer_labels
                            ? *out.answer_labels
                            : make_label_vector(LabelValue::Negative, Provenance::AnswerBlock));
    }
    return {multilabel_f1(preds, truths, F1Mode::Macro),
            multilabel_f1(preds, truths, F1Mode::Micro)};
}

MetricsReport evaluate(const std::vector<EvaluationExample>& examples,
                       const LabelerLexicon& lexicon, UncertainPolicy policy) {
    MetricsReport report;
    report.n_examples = examples.size();
    if (examples.empty()) return report;

    BleuAccumulator bleu;
    double rouge_sum = 0.0;
    std::vector<LabelVector> truth_labels;
    std::vector<LabelVector> think_labels;
    std::vector<LabelVector> answer_labels;
    std::vector<StructuredOutput> outputs;
    for (const auto& ex : examples) {
        const auto cand_tokens = tokenize(ex.output.think_text);
        const auto ref_tokens = tokenize(ex.reference_text);
        bleu.add(cand_tokens, ref_tokens);
        rouge_sum += rouge_l(cand_tokens, ref_tokens);
        truth_labels.push_back(ex.truth_labels);
        think_labels.push_back(extract_labels(ex.output.think_text, lexicon));
        answer_labels.push_back(ex.output.answer_labels
                                    ? *ex.output.answer_labels
                                    : make_label_vector(LabelValue::Negative,
                                                        Provenance::AnswerBlock));
        outputs.push_back(ex.output);
    }
    for (int n = 1; n <= 4; ++n) report.bleu[n - 1] = bleu.score(n);
    report.rouge_l = rouge_sum / static_cast<double>(examples.size());
    report.report_macro_f1 = multilabel_f1(think_labels, truth_labels, F1Mode::Macro, policy);
    report.report_micro_f1 = multilabel_f1(think_labels, truth_labels, F1Mode::Micro, policy);
    report.answer_macro_f1 = multilabel_f1(answer_labels, truth_labels, F1Mode::Macro, policy);
    report.answer_micro_f1 = multilabel_f1(answer_labels, truth_labels, F1Mode::Micro, policy);
    auto [scs_macro, scs_micro] = self_consistency(outputs, lexicon);
    report.scs_macro = scs_macro;
    report.scs_micro = scs_micro;
    return report;
}

std::string MetricsReport::to_json_text() const {
    nlohmann::json doc;
    doc["bleu_1"] = bleu[0];
    doc["bleu_2"] = bleu[1];
    doc["bleu_3"] = bleu[2];
    doc["bleu_4"] = bleu[3];
    doc["rouge_l"] = rouge_l;
    doc["report_macro_f1"] = report_macro_f1;
    doc["report_micro_f1"] = report_micro_f1;
    doc["answer_macro_f1"] = answer_macro_f1;
    doc["answer_micro_f1"] = answer_micro_f1;
    doc["scs_macro"] = scs_macro;
    doc["scs_micro"] = scs_micro;
    doc["n_examples"] = n_examples;
    doc["external"] = nlohmann::json::object();
    for (const auto& [key, value] : external) doc["external"][key] = value;
    return doc.dump(2);
}

std::string MetricsReport::to_table_text() const {
    std::ostringstream out;
    out << std::left << std::setw(20) << "metric" << std::right << std::setw(10) << "fraction"
        << std::setw(10) << "x100" << '\n';
    auto row = [&](const std::string& name, double value) {
        out << std::left << std::setw(20) << name << std::right << std::setw(10) << std::fixed
            << std::setprecision(4) << value << std::setw(10) << std::setprecision(2)
            << value * 100.0 << '\n';
    };
    row("bleu_1", bleu[0]);
    row("bleu_2", bleu[1]);
    row("bleu_3", bleu[2]);
    row("bleu_4", bleu[3]);
    row("rouge_l", rouge_l);
    row("report_macro_f1", report_macro_f1);
    row("report_micro_f1", report_micro_f1);
    row("answer_macro_f1", answer_macro_f1);
    row("answer_micro_f1", answer_micro_f1);
    row("scs_macro", scs_macro);
    row("scs_micro", scs_micro);
    out << std::left << std::setw(20) << "n_examples" << std::right << std::setw(10) << n_examples
        << '\n';
    return out.str();
}

}  // namespace reportrl

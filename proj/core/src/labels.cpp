#include "reportrl/labels.hpp"

#include <cctype>
#include <sstream>

namespace reportrl {

const std::array<std::string, kCategoryCount>& category_names() {
    static const std::array<std::string, kCategoryCount> names = {
        "Atelectasis",
        "Cardiomegaly",
        "Consolidation",
        "Edema",
        "Enlarged Cardiomediastinum",
        "Fracture",
        "Lung Lesion",
        "Lung Opacity",
        "No Finding",
        "Pleural Effusion",
        "Pleural Other",
        "Pneumonia",
        "Pneumothorax",
        "Support Devices",
    };
    return names;
}

const std::string& category_name(Category c) {
    return category_names()[static_cast<std::size_t>(c)];
}

std::optional<Category> category_from_name(std::string_view name) {
    const auto& names = category_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<Category>(i);
    }
    return std::nullopt;
}

double label_value_to_double(LabelValue v) {
    switch (v) {
        case LabelValue::Positive: return 1.0;
        case LabelValue::Negative: return 0.0;
        case LabelValue::Uncertain: return -1.0;
    }
    return 0.0;
}

std::optional<LabelValue> label_value_from_double(double d) {
    if (d == 1.0) return LabelValue::Positive;
    if (d == 0.0) return LabelValue::Negative;
    if (d == -1.0) return LabelValue::Uncertain;
    return std::nullopt;
}

std::string provenance_to_string(Provenance p) {
    switch (p) {
        case Provenance::GroundTruth: return "ground_truth";
        case Provenance::LabelerOutput: return "labeler_output";
        case Provenance::AnswerBlock: return "answer_block";
    }
    return "ground_truth";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
    if (s == "ground_truth") return Provenance::GroundTruth;
    if (s == "labeler_output") return Provenance::LabelerOutput;
    if (s == "answer_block") return Provenance::AnswerBlock;
    return std::nullopt;
}

LabelVector make_label_vector(LabelValue fill, Provenance provenance) {
    LabelVector v;
    v.values.fill(fill);
    v.provenance = provenance;
    return v;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string SchemaReport::describe() const {
    std::ostringstream out;
    const char* sep = "";
    if (!missing_keys.empty()) {
        out << "missing keys:";
        for (const auto& k : missing_keys) out << " \"" << k << "\"";
        sep = "; ";
    }
    if (!unknown_keys.empty()) {
        out << sep << "unknown keys:";
        for (const auto& k : unknown_keys) out << " \"" << k << "\"";
        sep = "; ";
    }
    if (!out_of_range.empty()) {
        out << sep << "out-of-range values:";
        for (const auto& [k, v] : out_of_range) out << " \"" << k << "\"=" << v;
        sep = "; ";
    }
    if (!non_numeric_keys.empty()) {
        out << sep << "non-numeric values:";
        for (const auto& k : non_numeric_keys) out << " \"" << k << "\"";
    }
    return out.str();
}

std::variant<LabelVector, SchemaReport> label_vector_from_json_map(
    const std::map<std::string, double>& raw, Provenance provenance) {
    SchemaReport report;
    std::array<std::optional<LabelValue>, kCategoryCount> seen;

    for (const auto& [raw_key, value] : raw) {
        const std::string key = trim(raw_key);
        auto category = category_from_name(key);
        if (!category) {
            report.unknown_keys.push_back(raw_key);
            continue;
        }
        auto label = label_value_from_double(value);
        if (!label) {
            report.out_of_range.emplace_back(key, value);
            continue;
        }
        seen[static_cast<std::size_t>(*category)] = *label;
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (!seen[i]) {
            bool flagged_bad_value = false;
            for (const auto& [k, _] : report.out_of_range) {
                if (k == category_names()[i]) flagged_bad_value = true;
            }
            if (!flagged_bad_value) report.missing_keys.push_back(category_names()[i]);
        }
    }
    if (!report.ok()) return report;

    LabelVector v;
    v.provenance = provenance;
    for (std::size_t i = 0; i < kCategoryCount; ++i) v.values[i] = *seen[i];
    return v;
}

std::map<std::string, double> label_vector_to_json_map(const LabelVector& v) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        out[category_names()[i]] = label_value_to_double(v.values[i]);
    }
    return out;
}

}  // namespace reportrl

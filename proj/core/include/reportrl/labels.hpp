#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reportrl {

// The 14 canonical chest-pathology categories. Index order is fixed and is
// the order used everywhere: serialization, reward aggregation, metric
// aggregation.
inline constexpr std::size_t kCategoryCount = 14;

enum class Category : std::size_t {
    Atelectasis = 0,
    Cardiomegaly,
    Consolidation,
    Edema,
    EnlargedCardiomediastinum,
    Fracture,
    LungLesion,
    LungOpacity,
    NoFinding,
    PleuralEffusion,
    PleuralOther,
    Pneumonia,
    Pneumothorax,
    SupportDevices,
};

// Canonical names, indexed by Category. These exact strings are the JSON
// keys of the answer block.
const std::array<std::string, kCategoryCount>& category_names();

const std::string& category_name(Category c);

// Exact match against a canonical name (caller trims beforehand).
std::optional<Category> category_from_name(std::string_view name);

enum class LabelValue {
    Positive,   // serialized 1.0
    Negative,   // serialized 0.0
    Uncertain,  // serialized -1.0
};

double label_value_to_double(LabelValue v);

// Accepts exactly 1.0, 0.0, -1.0 (integral forms included); anything else
// is rejected.
std::optional<LabelValue> label_value_from_double(double d);

enum class Provenance {
    GroundTruth,
    LabelerOutput,
    AnswerBlock,
};

std::string provenance_to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

// A complete assignment of the 14 categories. Immutable by convention:
// construct once, share freely.
struct LabelVector {
    std::array<LabelValue, kCategoryCount> values{};
    Provenance provenance = Provenance::GroundTruth;

    LabelValue at(Category c) const { return values[static_cast<std::size_t>(c)]; }
    void set(Category c, LabelValue v) { values[static_cast<std::size_t>(c)] = v; }

    bool operator==(const LabelVector& other) const { return values == other.values; }
};

LabelVector make_label_vector(LabelValue fill, Provenance provenance);

// Everything wrong with a would-be label map, collected rather than thrown:
// malformation is data the reward function needs to see.
struct SchemaReport {
    std::vector<std::string> missing_keys;
    std::vector<std::string> unknown_keys;
    std::vector<std::pair<std::string, double>> out_of_range;  // key -> offending value
    std::vector<std::string> non_numeric_keys;

    bool ok() const {
        return missing_keys.empty() && unknown_keys.empty() && out_of_range.empty() &&
               non_numeric_keys.empty();
    }
    std::string describe() const;
};

// Validates a parsed JSON object (key -> number) against the canonical
// schema. Keys are trimmed of surrounding whitespace, then matched exactly.
// Returns a LabelVector iff all 14 keys are present with values in
// {1.0, 0.0, -1.0}; otherwise the full SchemaReport.
std::variant<LabelVector, SchemaReport> label_vector_from_json_map(
    const std::map<std::string, double>& raw,
    Provenance provenance = Provenance::AnswerBlock);

// Inverse of label_vector_from_json_map: canonical key -> serialized value.
std::map<std::string, double> label_vector_to_json_map(const LabelVector& v);

std::string trim(std::string_view s);

}  // namespace reportrl

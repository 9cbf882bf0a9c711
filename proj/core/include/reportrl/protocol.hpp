#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "reportrl/labels.hpp"

namespace reportrl {

// Tag grammar, bit-exact: <think> ... </think> then <answer> ... </answer>,
// answer payload a single JSON object. Matching is case-sensitive.
inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

struct FormatFlags {
    // Exactly one think block and exactly one answer block, think first.
    // Multiple or nested pairs fail this on purpose: ambiguous structure
    // must not earn the format reward.
    bool tags_present = false;
    // The answer payload parses as a JSON object. Purely syntactic.
    bool json_valid = false;
    // json_valid and all 14 canonical keys carry in-range values.
    bool schema_complete = false;
    // First occurrences of the four delimiters appear in canonical order.
    bool ordering_ok = false;

    bool operator==(const FormatFlags&) const = default;
};

struct StructuredOutput {
    std::string think_text;   // text inside the think block, trimmed
    std::string answer_raw;   // raw payload inside the answer block, trimmed
    std::optional<LabelVector> answer_labels;  // present iff schema_complete
    SchemaReport answer_schema;  // populated when json_valid but schema incomplete
    FormatFlags flags;
};

// Total function: never throws, any byte sequence yields a StructuredOutput
// with flags describing what was found. Text outside the two blocks is
// ignored.
StructuredOutput parse_output(const std::string& raw);

// Emits a protocol string that parse_output accepts with all flags set and
// answer_labels == labels. Throws std::invalid_argument when think is empty
// or contains a tag delimiter.
std::string render_output(const std::string& think, const LabelVector& labels);

}  // namespace reportrl

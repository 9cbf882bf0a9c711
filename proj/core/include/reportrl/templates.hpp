#pragma once

#include <string>

#include "reportrl/labels.hpp"

namespace reportrl {

// One fixed sentence per (category, mention kind). The built-in lexicon is
// closed over these sentences: each one triggers exactly its own category
// with the intended value, so rendering -> labeling is lossless and the
// reward arithmetic stays exact.
enum class MentionKind {
    AssertPositive,
    AssertNegative,
    AssertUncertain,
};

// Returns the template sentence, or "" for the No Finding category's
// negative/uncertain slots (those assertions are vacuous: the labeler
// derives No Finding from the other 13 categories).
const std::string& template_sentence(Category c, MentionKind kind);

// Rendered when a narrative would otherwise be empty.
const std::string& empty_findings_sentence();

}  // namespace reportrl

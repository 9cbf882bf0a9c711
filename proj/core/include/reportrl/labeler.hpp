#pragma once

#include <string>
#include <vector>

#include "reportrl/labels.hpp"

namespace reportrl {

// One rule per category. Phrases are matched as consecutive lowercase token
// sequences; a cue scopes a trigger when it starts earlier in the same
// clause (clauses split on . ; ! ?). Uncertainty outranks negation.
struct LabelerRule {
    Category category = Category::Atelectasis;
    std::vector<std::string> trigger_phrases;
    std::vector<std::string> negation_cues;
    std::vector<std::string> uncertainty_cues;
};

struct LabelerLexicon {
    std::vector<LabelerRule> rules;  // one per category, category order
    std::string version;
};

// The shipped lexicon, closed over the sentence templates: every template
// sentence extracts back to exactly the (category, value) it asserts.
const LabelerLexicon& builtin_lexicon();

// Loads a lexicon from the documented JSON layout; throws std::runtime_error
// with every violation listed when the file is structurally invalid.
LabelerLexicon lexicon_from_json_text(const std::string& json_text);
LabelerLexicon load_lexicon(const std::string& path);
std::string lexicon_to_json_text(const LabelerLexicon& lexicon);

// Deterministic rule-based extraction of a LabelVector from free-text
// findings. Unmentioned categories are Negative; negated triggers are
// Negative; uncertain triggers are Uncertain; later mentions override
// earlier ones. No Finding is derived: Positive iff the other 13 categories
// all come out Negative.
LabelVector extract_labels(const std::string& text, const LabelerLexicon& lexicon);

inline LabelVector extract_labels(const std::string& text) {
    return extract_labels(text, builtin_lexicon());
}

}  // namespace reportrl

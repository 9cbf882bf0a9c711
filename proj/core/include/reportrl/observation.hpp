#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "reportrl/labels.hpp"

namespace reportrl {

// Per-category evidence strength, the toy stand-in for the image. The policy
// reads these; it never sees ground-truth labels.
enum class Evidence {
    Positive = 0,
    Negative = 1,
    Ambiguous = 2,
};

inline constexpr std::size_t kEvidenceCount = 3;

struct Observation {
    std::array<Evidence, kCategoryCount> evidence{};

    Evidence at(Category c) const { return evidence[static_cast<std::size_t>(c)]; }
    bool operator==(const Observation&) const = default;
};

// The symbol an uncorrupted observation carries for a label.
inline Evidence natural_evidence(LabelValue v) {
    switch (v) {
        case LabelValue::Positive: return Evidence::Positive;
        case LabelValue::Negative: return Evidence::Negative;
        case LabelValue::Uncertain: return Evidence::Ambiguous;
    }
    return Evidence::Negative;
}

std::string_view evidence_to_string(Evidence e);
std::optional<Evidence> evidence_from_string(std::string_view s);

}  // namespace reportrl

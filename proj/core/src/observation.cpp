#include "reportrl/observation.hpp"

namespace reportrl {

std::string_view evidence_to_string(Evidence e) {
    switch (e) {
        case Evidence::Positive: return "positive";
        case Evidence::Negative: return "negative";
        case Evidence::Ambiguous: return "ambiguous";
    }
    return "negative";
}

std::optional<Evidence> evidence_from_string(std::string_view s) {
    if (s == "positive") return Evidence::Positive;
    if (s == "negative") return Evidence::Negative;
    if (s == "ambiguous") return Evidence::Ambiguous;
    return std::nullopt;
}

}  // namespace reportrl

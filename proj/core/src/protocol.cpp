#include "reportrl/protocol.hpp"

#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace reportrl {

namespace {

std::vector<std::size_t> find_all(const std::string& haystack, std::string_view needle) {
    std::vector<std::size_t> positions;
    std::size_t pos = haystack.find(needle);
    while (pos != std::string::npos) {
        positions.push_back(pos);
        pos = haystack.find(needle, pos + 1);
    }
    return positions;
}

// Extracts the span between the first `open` and the next `close` after it,
// trimmed. Returns nullopt when no such pair exists.
std::optional<std::string> first_block(const std::string& raw, std::string_view open,
                                       std::string_view close) {
    std::size_t open_pos = raw.find(open);
    if (open_pos == std::string::npos) return std::nullopt;
    std::size_t body = open_pos + open.size();
    std::size_t close_pos = raw.find(close, body);
    if (close_pos == std::string::npos) return std::nullopt;
    return trim(std::string_view(raw).substr(body, close_pos - body));
}

}  // namespace

StructuredOutput parse_output(const std::string& raw) {
    StructuredOutput out;

    const auto think_opens = find_all(raw, kThinkOpen);
    const auto think_closes = find_all(raw, kThinkClose);
    const auto answer_opens = find_all(raw, kAnswerOpen);
    const auto answer_closes = find_all(raw, kAnswerClose);

    // The close tags carry a '/', so an open-tag search never matches
    // inside a close tag and the counts are exact.
    const bool one_each = think_opens.size() == 1 && think_closes.size() == 1 &&
                          answer_opens.size() == 1 && answer_closes.size() == 1;
    const bool any_each = !think_opens.empty() && !think_closes.empty() &&
                          !answer_opens.empty() && !answer_closes.empty();
    out.flags.ordering_ok = any_each && think_opens.front() < think_closes.front() &&
                            think_closes.front() < answer_opens.front() &&
                            answer_opens.front() < answer_closes.front();
    out.flags.tags_present = one_each && out.flags.ordering_ok;

    if (auto think = first_block(raw, kThinkOpen, kThinkClose)) out.think_text = *think;
    if (auto answer = first_block(raw, kAnswerOpen, kAnswerClose)) out.answer_raw = *answer;

    if (!out.answer_raw.empty()) {
        nlohmann::json parsed = nlohmann::json::parse(out.answer_raw, nullptr, false);
        out.flags.json_valid = !parsed.is_discarded() && parsed.is_object();
        if (out.flags.json_valid) {
            std::map<std::string, double> numeric;
            std::vector<std::string> non_numeric;
            for (const auto& [key, value] : parsed.items()) {
                if (value.is_number()) {
                    numeric[key] = value.get<double>();
                } else {
                    non_numeric.push_back(key);
                }
            }
            auto result = label_vector_from_json_map(numeric, Provenance::AnswerBlock);
            if (std::holds_alternative<LabelVector>(result) && non_numeric.empty()) {
                out.answer_labels = std::get<LabelVector>(result);
                out.flags.schema_complete = true;
            } else {
                SchemaReport report = std::holds_alternative<SchemaReport>(result)
                                          ? std::get<SchemaReport>(result)
                                          : SchemaReport{};
                for (const auto& key : non_numeric) {
                    const std::string trimmed = trim(key);
                    if (category_from_name(trimmed)) {
                        std::erase(report.missing_keys, trimmed);
                        report.non_numeric_keys.push_back(key);
                    } else {
                        report.unknown_keys.push_back(key);
                    }
                }
                out.answer_schema = std::move(report);
            }
        }
    }
    return out;
}

std::string render_output(const std::string& think, const LabelVector& labels) {
    if (think.empty()) {
        throw std::invalid_argument("render_output: think text must be non-empty");
    }
    for (std::string_view delim : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
        if (think.find(delim) != std::string::npos) {
            throw std::invalid_argument("render_output: think text contains tag delimiter " +
                                        std::string(delim));
        }
    }
    nlohmann::json answer = nlohmann::json::object();
    for (const auto& [key, value] : label_vector_to_json_map(labels)) {
        answer[key] = value;
    }
    std::string out;
    out.reserve(think.size() + 512);
    out += kThinkOpen;
    out += '\n';
    out += think;
    out += '\n';
    out += kThinkClose;
    out += '\n';
    out += kAnswerOpen;
    out += '\n';
    out += answer.dump(2);
    out += '\n';
    out += kAnswerClose;
    return out;
}

}  // namespace reportrl

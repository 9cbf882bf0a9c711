#include "reportrl/labeler.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "reportrl/tokenize.hpp"

namespace reportrl {

namespace {

const std::vector<std::string>& default_negation_cues() {
    static const std::vector<std::string> cues = {
        "no",      "not",         "without",      "absent", "absence of",
        "free of", "clear of",    "negative for", "resolved",
    };
    return cues;
}

const std::vector<std::string>& default_uncertainty_cues() {
    static const std::vector<std::string> cues = {
        "possible",  "possibly",       "probable",       "questionable",
        "suspected", "suspicious for", "concern for",    "cannot exclude",
        "may represent", "may be",     "could represent", "equivocal",
    };
    return cues;
}

LabelerRule make_rule(Category c, std::vector<std::string> triggers) {
    LabelerRule rule;
    rule.category = c;
    rule.trigger_phrases = std::move(triggers);
    rule.negation_cues = default_negation_cues();
    rule.uncertainty_cues = default_uncertainty_cues();
    return rule;
}

// Token-index start positions of `phrase` (itself tokenized) inside `tokens`.
void phrase_positions(const std::vector<std::string>& tokens,
                      const std::vector<std::string>& phrase, std::vector<std::size_t>& out) {
    if (phrase.empty() || phrase.size() > tokens.size()) return;
    for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
        bool match = true;
        for (std::size_t j = 0; j < phrase.size(); ++j) {
            if (tokens[start + j] != phrase[j]) {
                match = false;
                break;
            }
        }
        if (match) out.push_back(start);
    }
}

struct TokenizedRule {
    Category category;
    std::vector<std::vector<std::string>> triggers;
    std::vector<std::vector<std::string>> negations;
    std::vector<std::vector<std::string>> uncertainties;
};

std::vector<TokenizedRule> tokenize_rules(const LabelerLexicon& lexicon) {
    std::vector<TokenizedRule> out;
    out.reserve(lexicon.rules.size());
    for (const auto& rule : lexicon.rules) {
        TokenizedRule t;
        t.category = rule.category;
        for (const auto& p : rule.trigger_phrases) t.triggers.push_back(tokenize(p));
        for (const auto& p : rule.negation_cues) t.negations.push_back(tokenize(p));
        for (const auto& p : rule.uncertainty_cues) t.uncertainties.push_back(tokenize(p));
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> split_clauses(const std::string& text) {
    std::vector<std::string> clauses;
    std::string current;
    for (char ch : text) {
        if (ch == '.' || ch == ';' || ch == '!' || ch == '?') {
            if (!current.empty()) clauses.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!current.empty()) clauses.push_back(std::move(current));
    return clauses;
}

}  // namespace

const LabelerLexicon& builtin_lexicon() {
    static const LabelerLexicon lexicon = [] {
        LabelerLexicon lex;
        lex.version = "builtin-1";
        lex.rules = {
            make_rule(Category::Atelectasis, {"atelectasis", "atelectatic change"}),
            make_rule(Category::Cardiomegaly, {"cardiomegaly", "enlarged cardiac silhouette"}),
            make_rule(Category::Consolidation, {"consolidation"}),
            make_rule(Category::Edema, {"edema", "vascular congestion"}),
            make_rule(Category::EnlargedCardiomediastinum,
                      {"cardiomediastinal silhouette is enlarged", "cardiomediastinal enlargement",
                       "enlargement of the cardiomediastinum", "enlarged cardiomediastinum",
                       "widened mediastinum"}),
            make_rule(Category::Fracture, {"fracture", "fractures"}),
            make_rule(Category::LungLesion, {"nodule", "nodules", "mass", "lung lesion"}),
            make_rule(Category::LungOpacity, {"opacity", "opacities"}),
            make_rule(Category::NoFinding, {"no acute cardiopulmonary process"}),
            make_rule(Category::PleuralEffusion,
                      {"pleural effusion", "pleural effusions", "effusion", "effusions"}),
            make_rule(Category::PleuralOther,
                      {"pleural thickening", "pleural scarring", "fibrothorax"}),
            make_rule(Category::Pneumonia, {"pneumonia", "infectious process"}),
            make_rule(Category::Pneumothorax, {"pneumothorax"}),
            make_rule(Category::SupportDevices,
                      {"endotracheal tube", "support device", "support devices", "port a cath",
                       "central venous catheter", "pacemaker"}),
        };
        return lex;
    }();
    return lexicon;
}

LabelVector extract_labels(const std::string& text, const LabelerLexicon& lexicon) {
    const auto rules = tokenize_rules(lexicon);
    LabelVector result = make_label_vector(LabelValue::Negative, Provenance::LabelerOutput);

    std::vector<std::size_t> trigger_hits;
    std::vector<std::size_t> cue_hits;
    for (const auto& clause : split_clauses(text)) {
        const auto tokens = tokenize(clause);
        if (tokens.empty()) continue;
        for (const auto& rule : rules) {
            if (rule.category == Category::NoFinding) continue;  // derived below
            trigger_hits.clear();
            for (const auto& phrase : rule.triggers) {
                phrase_positions(tokens, phrase, trigger_hits);
            }
            if (trigger_hits.empty()) continue;
            const std::size_t last_trigger =
                *std::max_element(trigger_hits.begin(), trigger_hits.end());

            auto any_cue_before = [&](const std::vector<std::vector<std::string>>& cues) {
                cue_hits.clear();
                for (const auto& cue : cues) phrase_positions(tokens, cue, cue_hits);
                for (std::size_t pos : cue_hits) {
                    if (pos < last_trigger) return true;
                }
                return false;
            };

            LabelValue value = LabelValue::Positive;
            if (any_cue_before(rule.uncertainties)) {
                value = LabelValue::Uncertain;  // outranks negation in the same clause
            } else if (any_cue_before(rule.negations)) {
                value = LabelValue::Negative;
            }
            result.set(rule.category, value);  // last mention wins across clauses
        }
    }

    bool all_negative = true;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (static_cast<Category>(i) == Category::NoFinding) continue;
        if (result.values[i] != LabelValue::Negative) all_negative = false;
    }
    result.set(Category::NoFinding, all_negative ? LabelValue::Positive : LabelValue::Negative);
    return result;
}

LabelerLexicon lexicon_from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    std::vector<std::string> problems;
    LabelerLexicon lexicon;
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::runtime_error("lexicon: not a JSON object");
    }
    lexicon.version = doc.value("version", std::string("unversioned"));
    std::array<bool, kCategoryCount> covered{};
    if (!doc.contains("rules") || !doc["rules"].is_array()) {
        problems.push_back("missing \"rules\" array");
    } else {
        for (const auto& entry : doc["rules"]) {
            if (!entry.is_object() || !entry.contains("category")) {
                problems.push_back("rule entry without \"category\"");
                continue;
            }
            auto category = category_from_name(trim(entry["category"].get<std::string>()));
            if (!category) {
                problems.push_back("unknown category \"" +
                                   entry["category"].get<std::string>() + "\"");
                continue;
            }
            LabelerRule rule;
            rule.category = *category;
            auto read_list = [&](const char* key, std::vector<std::string>& dst,
                                 const std::vector<std::string>& fallback) {
                if (!entry.contains(key)) {
                    dst = fallback;
                    return;
                }
                if (!entry[key].is_array()) {
                    problems.push_back(std::string("\"") + key + "\" of " +
                                       category_name(*category) + " is not an array");
                    return;
                }
                for (const auto& item : entry[key]) {
                    if (item.is_string()) dst.push_back(item.get<std::string>());
                }
            };
            read_list("triggers", rule.trigger_phrases, {});
            read_list("negation_cues", rule.negation_cues, default_negation_cues());
            read_list("uncertainty_cues", rule.uncertainty_cues, default_uncertainty_cues());
            if (rule.trigger_phrases.empty()) {
                problems.push_back("category " + category_name(*category) +
                                   " has no trigger phrases");
            }
            covered[static_cast<std::size_t>(*category)] = true;
            lexicon.rules.push_back(std::move(rule));
        }
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (!covered[i]) problems.push_back("category " + category_names()[i] + " has no rule");
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid lexicon:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw std::runtime_error(msg.str());
    }
    return lexicon;
}

LabelerLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return lexicon_from_json_text(buffer.str());
}

std::string lexicon_to_json_text(const LabelerLexicon& lexicon) {
    nlohmann::json doc;
    doc["version"] = lexicon.version;
    doc["rules"] = nlohmann::json::array();
    for (const auto& rule : lexicon.rules) {
        nlohmann::json entry;
        entry["category"] = category_name(rule.category);
        entry["triggers"] = rule.trigger_phrases;
        entry["negation_cues"] = rule.negation_cues;
        entry["uncertainty_cues"] = rule.uncertainty_cues;
        doc["rules"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

}  // namespace reportrl

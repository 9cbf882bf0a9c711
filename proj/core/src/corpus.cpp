#include "reportrl/corpus.hpp"

#include <fstream>
#include <sstream>

#include "reportrl/errors.hpp"
#include "reportrl/rng.hpp"
#include "reportrl/templates.hpp"

namespace reportrl {

namespace {

constexpr int kSchemaVersion = 1;

const char* kKnownFields[] = {"schema_version", "study_id",    "split",
                              "findings_text",  "labels",      "observation"};

bool is_known_field(const std::string& key) {
    for (const char* field : kKnownFields) {
        if (key == field) return true;
    }
    return false;
}

CategoryRates rates_for(const CorpusSpec& spec, Category c) {
    auto it = spec.overrides.find(c);
    return it == spec.overrides.end() ? spec.default_rates : it->second;
}

}  // namespace

std::string split_to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

std::optional<Split> split_from_string(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

CorpusSpec CorpusSpec::from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw DataError("corpus spec: not a JSON object");
    }
    CorpusSpec spec;
    spec.n_studies = doc.value("n_studies", spec.n_studies);
    spec.seed = doc.value("seed", spec.seed);
    spec.evidence_noise = doc.value("evidence_noise", spec.evidence_noise);
    spec.explicit_negative_rate =
        doc.value("explicit_negative_rate", spec.explicit_negative_rate);
    spec.default_rates.positive = doc.value("positive_rate", spec.default_rates.positive);
    spec.default_rates.uncertain = doc.value("uncertain_rate", spec.default_rates.uncertain);
    if (doc.contains("category_rates")) {
        if (!doc["category_rates"].is_object()) {
            throw DataError("corpus spec: \"category_rates\" must be an object");
        }
        for (const auto& [name, rates] : doc["category_rates"].items()) {
            auto category = category_from_name(trim(name));
            if (!category) throw DataError("corpus spec: unknown category \"" + name + "\"");
            CategoryRates r = spec.default_rates;
            r.positive = rates.value("positive", r.positive);
            r.uncertain = rates.value("uncertain", r.uncertain);
            spec.overrides[*category] = r;
        }
    }
    auto problems = spec.validate();
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid corpus spec:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw DataError(msg.str());
    }
    return spec;
}

CorpusSpec CorpusSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus spec file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string CorpusSpec::to_json_text() const {
    nlohmann::json doc;
    doc["n_studies"] = n_studies;
    doc["seed"] = seed;
    doc["evidence_noise"] = evidence_noise;
    doc["explicit_negative_rate"] = explicit_negative_rate;
    doc["positive_rate"] = default_rates.positive;
    doc["uncertain_rate"] = default_rates.uncertain;
    for (const auto& [category, rates] : overrides) {
        doc["category_rates"][category_name(category)] = {{"positive", rates.positive},
                                                          {"uncertain", rates.uncertain}};
    }
    return doc.dump(2);
}

std::vector<std::string> CorpusSpec::validate() const {
    std::vector<std::string> problems;
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n_studies == 0) problems.push_back("n_studies must be positive");
    if (!in_unit(evidence_noise)) problems.push_back("evidence_noise outside [0, 1]");
    if (!in_unit(explicit_negative_rate)) {
        problems.push_back("explicit_negative_rate outside [0, 1]");
    }
    auto check_rates = [&](const CategoryRates& r, const std::string& scope) {
        if (!in_unit(r.positive)) problems.push_back(scope + " positive rate outside [0, 1]");
        if (!in_unit(r.uncertain)) problems.push_back(scope + " uncertain rate outside [0, 1]");
        if (r.positive + r.uncertain > 1.0) {
            problems.push_back(scope + " positive + uncertain rates exceed 1");
        }
    };
    check_rates(default_rates, "default");
    for (const auto& [category, rates] : overrides) {
        check_rates(rates, category_name(category));
    }
    return problems;
}

std::vector<StudyRecord> generate_corpus(const CorpusSpec& spec) {
    Rng rng(spec.seed);
    std::vector<StudyRecord> records;
    records.reserve(spec.n_studies);

    for (std::size_t i = 0; i < spec.n_studies; ++i) {
        StudyRecord record;
        {
            std::ostringstream id;
            id << "study-";
            id.width(6);
            id.fill('0');
            id << i;
            record.study_id = id.str();
        }

        // Labels: pathology categories per marginals, No Finding derived.
        record.labels = make_label_vector(LabelValue::Negative, Provenance::GroundTruth);
        bool any_abnormal = false;
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            const auto category = static_cast<Category>(c);
            if (category == Category::NoFinding) continue;
            const CategoryRates rates = rates_for(spec, category);
            const double u = rng.uniform();
            if (u < rates.positive) {
                record.labels.set(category, LabelValue::Positive);
                any_abnormal = true;
            } else if (u < rates.positive + rates.uncertain) {
                record.labels.set(category, LabelValue::Uncertain);
                any_abnormal = true;
            }
        }
        record.labels.set(Category::NoFinding,
                          any_abnormal ? LabelValue::Negative : LabelValue::Positive);

        // Narrative: mention positives and uncertains; negatives are mostly
        // omitted, occasionally negated explicitly.
        std::vector<std::string> sentences;
        if (record.labels.at(Category::NoFinding) == LabelValue::Positive) {
            sentences.push_back(template_sentence(Category::NoFinding, MentionKind::AssertPositive));
        }
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            const auto category = static_cast<Category>(c);
            if (category == Category::NoFinding) continue;
            switch (record.labels.at(category)) {
                case LabelValue::Positive:
                    sentences.push_back(template_sentence(category, MentionKind::AssertPositive));
                    break;
                case LabelValue::Uncertain:
                    sentences.push_back(template_sentence(category, MentionKind::AssertUncertain));
                    break;
                case LabelValue::Negative:
                    if (rng.uniform() < spec.explicit_negative_rate) {
                        sentences.push_back(
                            template_sentence(category, MentionKind::AssertNegative));
                    }
                    break;
            }
        }
        std::string text;
        for (const auto& sentence : sentences) {
            if (!text.empty()) text += ' ';
            text += sentence;
        }
        record.findings_text = std::move(text);

        // Observation: the label's natural symbol, corrupted at the noise
        // rate to one of the other two symbols.
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            const Evidence natural = natural_evidence(record.labels.values[c]);
            Evidence actual = natural;
            if (spec.evidence_noise > 0.0 && rng.uniform() < spec.evidence_noise) {
                const auto offset = rng.uniform() < 0.5 ? 1 : 2;
                actual = static_cast<Evidence>(
                    (static_cast<std::size_t>(natural) + offset) % kEvidenceCount);
            }
            record.observation.evidence[c] = actual;
        }

        record.split = assign_split(record.study_id, spec.seed);
        records.push_back(std::move(record));
    }
    return records;
}

nlohmann::json study_to_json(const StudyRecord& record) {
    nlohmann::json doc = record.extra.is_object() ? record.extra : nlohmann::json::object();
    doc["schema_version"] = kSchemaVersion;
    doc["study_id"] = record.study_id;
    doc["split"] = split_to_string(record.split);
    doc["findings_text"] = record.findings_text;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [key, value] : label_vector_to_json_map(record.labels)) labels[key] = value;
    doc["labels"] = std::move(labels);
    nlohmann::json observation = nlohmann::json::object();
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        observation[category_names()[c]] =
            std::string(evidence_to_string(record.observation.evidence[c]));
    }
    doc["observation"] = std::move(observation);
    return doc;
}

StudyRecord study_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw DataError("study record is not a JSON object");
    StudyRecord record;
    if (!doc.contains("study_id") || !doc["study_id"].is_string()) {
        throw DataError("study record missing \"study_id\"");
    }
    record.study_id = doc["study_id"].get<std::string>();
    if (!doc.contains("findings_text") || !doc["findings_text"].is_string()) {
        throw DataError("study record missing \"findings_text\"");
    }
    record.findings_text = doc["findings_text"].get<std::string>();
    if (!doc.contains("labels") || !doc["labels"].is_object()) {
        throw DataError("study record missing \"labels\"");
    }
    std::map<std::string, double> raw;
    for (const auto& [key, value] : doc["labels"].items()) {
        if (value.is_null()) {
            // external labelers may emit a blank/unmentioned state; it reads
            // as negative
            raw[key] = 0.0;
            continue;
        }
        if (!value.is_number()) throw DataError("label \"" + key + "\" is not a number");
        raw[key] = value.get<double>();
    }
    auto parsed = label_vector_from_json_map(raw, Provenance::GroundTruth);
    if (std::holds_alternative<SchemaReport>(parsed)) {
        throw DataError("invalid labels: " + std::get<SchemaReport>(parsed).describe());
    }
    record.labels = std::get<LabelVector>(parsed);

    if (doc.contains("observation")) {
        if (!doc["observation"].is_object()) throw DataError("\"observation\" is not an object");
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            const std::string& name = category_names()[c];
            if (!doc["observation"].contains(name)) {
                throw DataError("observation missing category \"" + name + "\"");
            }
            auto evidence = evidence_from_string(doc["observation"][name].get<std::string>());
            if (!evidence) {
                throw DataError("observation for \"" + name + "\" is not a known symbol");
            }
            record.observation.evidence[c] = *evidence;
        }
    } else {
        // Studies imported without evidence fall back to noise-free symbols.
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            record.observation.evidence[c] = natural_evidence(record.labels.values[c]);
        }
    }

    if (doc.contains("split")) {
        auto split = split_from_string(doc["split"].get<std::string>());
        if (!split) throw DataError("unknown split \"" + doc["split"].get<std::string>() + "\"");
        record.split = *split;
    }

    for (const auto& [key, value] : doc.items()) {
        if (!is_known_field(key)) record.extra[key] = value;
    }
    return record;
}

std::vector<StudyRecord> read_study_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::vector<StudyRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            throw DataError(path + ":" + std::to_string(line_number) + ": invalid JSON");
        }
        try {
            records.push_back(study_from_json(doc));
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_number) + ": " + e.what());
        }
    }
    return records;
}

void write_study_jsonl(const std::string& path, const std::vector<StudyRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file: " + path);
    for (const auto& record : records) {
        out << study_to_json(record).dump() << '\n';
    }
    if (!out) throw DataError("failed writing corpus file: " + path);
}

IdfTable build_idf(const std::vector<StudyRecord>& records) {
    std::vector<std::string> documents;
    documents.reserve(records.size());
    for (const auto& record : records) documents.push_back(record.findings_text);
    return IdfTable::build(documents);
}

std::string idf_to_json_text(const IdfTable& table) {
    nlohmann::json doc;
    doc["n_documents"] = table.document_count();
    nlohmann::json df = nlohmann::json::object();
    // std::map ordering for deterministic output
    std::map<std::string, std::size_t> sorted(table.document_frequencies().begin(),
                                              table.document_frequencies().end());
    for (const auto& [token, count] : sorted) df[token] = count;
    doc["document_frequency"] = std::move(df);
    return doc.dump(2);
}

IdfTable idf_from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("n_documents") ||
        !doc.contains("document_frequency")) {
        throw DataError("idf table: malformed JSON");
    }
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& [token, count] : doc["document_frequency"].items()) {
        df[token] = count.get<std::size_t>();
    }
    return IdfTable::from_counts(doc["n_documents"].get<std::size_t>(), std::move(df));
}

Split assign_split(const std::string& study_id, std::uint64_t seed) {
    // FNV-1a with a splitmix64 finalizer (FNV alone leaves the high bits
    // badly mixed for short ids), seed folded in. Stable across platforms.
    std::uint64_t hash = 14695981039346656037ull ^ seed;
    for (unsigned char ch : study_id) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    hash += 0x9e3779b97f4a7c15ull;
    hash = (hash ^ (hash >> 30)) * 0xbf58476d1ce4e5b9ull;
    hash = (hash ^ (hash >> 27)) * 0x94d049bb133111ebull;
    hash ^= hash >> 31;
    const double u = static_cast<double>(hash >> 11) * 0x1.0p-53;
    if (u < 0.8) return Split::Train;
    if (u < 0.9) return Split::Val;
    return Split::Test;
}

std::vector<StudyRecord> filter_split(const std::vector<StudyRecord>& records, Split split) {
    std::vector<StudyRecord> out;
    for (const auto& record : records) {
        if (record.split == split) out.push_back(record);
    }
    return out;
}

}  // namespace reportrl

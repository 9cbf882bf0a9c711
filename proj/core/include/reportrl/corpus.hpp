#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "reportrl/labels.hpp"
#include "reportrl/observation.hpp"
#include "reportrl/tokenize.hpp"

namespace reportrl {

enum class Split { Train, Val, Test };

std::string split_to_string(Split s);
std::optional<Split> split_from_string(std::string_view s);

struct StudyRecord {
    std::string study_id;
    std::string findings_text;  // reference narrative, never empty
    LabelVector labels;         // ground truth
    Observation observation;    // toy evidence the policy conditions on
    Split split = Split::Train;
    // Unknown JSONL fields, preserved verbatim on round-trip.
    nlohmann::json extra = nlohmann::json::object();
};

struct CategoryRates {
    double positive = 0.3;
    double uncertain = 0.05;
};

struct CorpusSpec {
    std::size_t n_studies = 200;
    std::uint64_t seed = 42;
    // Probability an observation symbol contradicts the label.
    double evidence_noise = 0.0;
    // Probability a negative category is mentioned with an explicit
    // negation instead of being omitted from the narrative.
    double explicit_negative_rate = 0.15;
    CategoryRates default_rates;
    std::map<Category, CategoryRates> overrides;

    static CorpusSpec from_json_text(const std::string& json_text);
    static CorpusSpec load(const std::string& path);
    std::string to_json_text() const;
    std::vector<std::string> validate() const;
};

// Labels sampled per category marginals (No Finding forced consistent with
// the labeler's derivation), narrative assembled from the sentence
// templates, observation = labels corrupted at the noise rate. Deterministic
// under CorpusSpec::seed.
std::vector<StudyRecord> generate_corpus(const CorpusSpec& spec);

// JSONL persistence, one study object per line. Malformed lines raise
// DataError naming the line number. An empty file is an empty corpus.
std::vector<StudyRecord> read_study_jsonl(const std::string& path);
void write_study_jsonl(const std::string& path, const std::vector<StudyRecord>& records);

nlohmann::json study_to_json(const StudyRecord& record);
StudyRecord study_from_json(const nlohmann::json& doc);  // throws DataError

// IDF over reference narratives, for the semantic reward.
IdfTable build_idf(const std::vector<StudyRecord>& records);

std::string idf_to_json_text(const IdfTable& table);
IdfTable idf_from_json_text(const std::string& json_text);

// Seeded FNV-1a hash of the study id -> stable 80/10/10 partition without a
// split file.
Split assign_split(const std::string& study_id, std::uint64_t seed);

std::vector<StudyRecord> filter_split(const std::vector<StudyRecord>& records, Split split);

}  // namespace reportrl

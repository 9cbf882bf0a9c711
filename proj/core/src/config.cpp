#include "reportrl/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reportrl/errors.hpp"

namespace reportrl {

namespace {

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("run config: not a JSON object");
    }
    RunConfig cfg;
    cfg.corpus_path = doc.value("corpus", std::string());
    cfg.out_dir = doc.value("out_dir", std::string());
    cfg.split = doc.value("split", cfg.split);
    cfg.lexicon_path = doc.value("lexicon", std::string());
    cfg.matrix_path = doc.value("cfs_matrix", std::string());
    cfg.log_rewards = doc.value("log_rewards", cfg.log_rewards);
    if (doc.contains("train")) cfg.train = TrainConfig::from_json(doc["train"]);
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    RunConfig cfg = from_json_text(read_file(path, "run config"));
    auto problems = cfg.validate();
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid run config " << path << ":";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
    return cfg;
}

std::string RunConfig::to_json_text() const {
    nlohmann::json doc;
    doc["corpus"] = corpus_path;
    doc["out_dir"] = out_dir;
    doc["split"] = split;
    if (!lexicon_path.empty()) doc["lexicon"] = lexicon_path;
    if (!matrix_path.empty()) doc["cfs_matrix"] = matrix_path;
    if (log_rewards) doc["log_rewards"] = true;
    doc["train"] = train.to_json();
    return doc.dump(2);
}

std::vector<std::string> RunConfig::validate() const {
    std::vector<std::string> problems;
    if (corpus_path.empty()) {
        problems.push_back("\"corpus\" path is required");
    } else if (!std::filesystem::exists(corpus_path)) {
        problems.push_back("corpus file does not exist: " + corpus_path);
    }
    if (!lexicon_path.empty() && !std::filesystem::exists(lexicon_path)) {
        problems.push_back("lexicon file does not exist: " + lexicon_path);
    }
    if (!matrix_path.empty() && !std::filesystem::exists(matrix_path)) {
        problems.push_back("scoring matrix file does not exist: " + matrix_path);
    }
    if (split != "train" && split != "val" && split != "test" && split != "all") {
        problems.push_back("split must be one of train, val, test, all");
    }
    for (auto& p : train.validate()) problems.push_back("train: " + p);
    return problems;
}

CfsScoringMatrix RunConfig::resolve_matrix() const {
    return matrix_path.empty() ? CfsScoringMatrix() : CfsScoringMatrix::load(matrix_path);
}

LabelerLexicon RunConfig::resolve_lexicon() const {
    return lexicon_path.empty() ? builtin_lexicon() : load_lexicon(lexicon_path);
}

std::vector<StudyRecord> RunConfig::load_records() const {
    auto records = read_study_jsonl(corpus_path);
    if (split == "all") return records;
    return filter_split(records, *split_from_string(split));
}

RewardConfig RewardConfig::load(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(read_file(path, "reward config"), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("reward config: not a JSON object");
    }
    RewardConfig cfg;
    if (doc.contains("weights")) {
        cfg.weights = RewardWeights::from_json_text(doc["weights"].dump());
    }
    cfg.lexicon_path = doc.value("lexicon", std::string());
    cfg.matrix_path = doc.value("cfs_matrix", std::string());
    std::vector<std::string> problems;
    if (!cfg.lexicon_path.empty() && !std::filesystem::exists(cfg.lexicon_path)) {
        problems.push_back("lexicon file does not exist: " + cfg.lexicon_path);
    }
    if (!cfg.matrix_path.empty() && !std::filesystem::exists(cfg.matrix_path)) {
        problems.push_back("scoring matrix file does not exist: " + cfg.matrix_path);
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid reward config " << path << ":";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
    return cfg;
}

CfsScoringMatrix RewardConfig::resolve_matrix() const {
    return matrix_path.empty() ? CfsScoringMatrix() : CfsScoringMatrix::load(matrix_path);
}

LabelerLexicon RewardConfig::resolve_lexicon() const {
    return lexicon_path.empty() ? builtin_lexicon() : load_lexicon(lexicon_path);
}

}  // namespace reportrl

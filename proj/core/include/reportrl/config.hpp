#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reportrl/grpo.hpp"
#include "reportrl/reward.hpp"

namespace reportrl {

// Top-level run configuration for the training pipeline. Referenced paths
// must exist at validation time; every violation is reported, not just the
// first.
struct RunConfig {
    std::string corpus_path;
    std::string out_dir;
    std::string split = "train";  // train | val | test | all
    std::string lexicon_path;     // empty: built-in lexicon
    std::string matrix_path;      // empty: default scoring matrix
    bool log_rewards = false;     // append per-candidate breakdowns to rewards.jsonl
    TrainConfig train;

    static RunConfig from_json_text(const std::string& json_text);
    static RunConfig load(const std::string& path);  // throws ConfigError with all violations
    std::string to_json_text() const;

    std::vector<std::string> validate() const;

    CfsScoringMatrix resolve_matrix() const;
    LabelerLexicon resolve_lexicon() const;
    std::vector<StudyRecord> load_records() const;  // corpus filtered to the split
};

// Shared by subcommands that need weights / matrix / lexicon without the
// full training block.
struct RewardConfig {
    RewardWeights weights;
    std::string lexicon_path;
    std::string matrix_path;

    static RewardConfig load(const std::string& path);
    CfsScoringMatrix resolve_matrix() const;
    LabelerLexicon resolve_lexicon() const;
};

}  // namespace reportrl

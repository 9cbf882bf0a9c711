// reportrl command line: corpus generation, output parsing, labeling,
// reward scoring, evaluation, and toy GRPO training.
//
// Exit codes: 0 success, 1 usage/config, 2 data error, 3 numerical error.
// Errors are emitted as a JSON object on stderr.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "reportrl/config.hpp"
#include "reportrl/corpus.hpp"
#include "reportrl/errors.hpp"
#include "reportrl/grpo.hpp"
#include "reportrl/metrics.hpp"
#include "reportrl/protocol.hpp"
#include "reportrl/reward.hpp"

namespace {

using namespace reportrl;

constexpr std::uint64_t kDefaultSeed = 42;  // used whenever --seed is absent

struct PredictionLine {
    std::string study_id;
    std::string raw;
};

std::vector<PredictionLine> read_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open predictions file: " + path);
    std::vector<PredictionLine> lines;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw DataError(path + ":" + std::to_string(line_number) + ": invalid JSON");
        }
        if (!doc.contains("study_id") || !doc["study_id"].is_string()) {
            throw DataError(path + ":" + std::to_string(line_number) +
                            ": missing \"study_id\"");
        }
        if (!doc.contains("raw") || !doc["raw"].is_string()) {
            throw DataError(path + ":" + std::to_string(line_number) + ": missing \"raw\"");
        }
        lines.push_back({doc["study_id"].get<std::string>(), doc["raw"].get<std::string>()});
    }
    return lines;
}

std::map<std::string, StudyRecord> index_by_id(const std::vector<StudyRecord>& records) {
    std::map<std::string, StudyRecord> by_id;
    for (const auto& record : records) by_id[record.study_id] = record;
    return by_id;
}

nlohmann::json flags_to_json(const FormatFlags& flags) {
    return {{"tags_present", flags.tags_present},
            {"json_valid", flags.json_valid},
            {"schema_complete", flags.schema_complete},
            {"ordering_ok", flags.ordering_ok}};
}

nlohmann::json labels_to_json(const LabelVector& labels) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [key, value] : label_vector_to_json_map(labels)) doc[key] = value;
    return doc;
}

nlohmann::json breakdown_to_json(const RewardBreakdown& b) {
    nlohmann::json doc;
    doc["consistency"] = b.consistency;
    doc["think_accuracy"] = b.think_accuracy;
    doc["answer_accuracy"] = b.answer_accuracy;
    doc["semantic"] = b.semantic;
    doc["format"] = b.format;
    doc["total"] = b.total;
    doc["diagnostics"] = {{"consistency_terms", b.consistency_terms},
                          {"think_accuracy_terms", b.think_accuracy_terms},
                          {"answer_accuracy_terms", b.answer_accuracy_terms}};
    return doc;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file: " + path);
    return out;
}

int run_gen_corpus(const std::string& spec_path, const std::string& out_path,
                   std::optional<std::uint64_t> seed) {
    CorpusSpec spec = CorpusSpec::load(spec_path);
    if (seed) spec.seed = *seed;
    auto records = generate_corpus(spec);
    write_study_jsonl(out_path, records);
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    for (const auto& record : records) {
        if (record.split == Split::Train) ++train;
        else if (record.split == Split::Val) ++val;
        else ++test;
    }
    std::cout << "wrote " << records.size() << " studies to " << out_path << " (train " << train
              << ", val " << val << ", test " << test << ")\n";
    return 0;
}

int run_parse(const std::string& in_path, const std::string& out_path,
              const std::string& format) {
    auto predictions = read_predictions(in_path);
    auto out = open_output(out_path);
    std::size_t tags = 0;
    std::size_t json_ok = 0;
    std::size_t schema_ok = 0;
    std::size_t ordering = 0;
    for (const auto& pred : predictions) {
        StructuredOutput parsed = parse_output(pred.raw);
        nlohmann::json doc;
        doc["study_id"] = pred.study_id;
        doc["think_text"] = parsed.think_text;
        doc["answer_raw"] = parsed.answer_raw;
        doc["answer_labels"] =
            parsed.answer_labels ? labels_to_json(*parsed.answer_labels) : nlohmann::json();
        doc["flags"] = flags_to_json(parsed.flags);
        if (!parsed.flags.schema_complete && parsed.flags.json_valid) {
            doc["schema_errors"] = parsed.answer_schema.describe();
        }
        out << doc.dump() << '\n';
        tags += parsed.flags.tags_present;
        json_ok += parsed.flags.json_valid;
        schema_ok += parsed.flags.schema_complete;
        ordering += parsed.flags.ordering_ok;
    }
    const std::size_t n = predictions.size();
    if (format == "json") {
        nlohmann::json summary;
        summary["n_outputs"] = n;
        summary["tags_present"] = tags;
        summary["json_valid"] = json_ok;
        summary["schema_complete"] = schema_ok;
        summary["ordering_ok"] = ordering;
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << "outputs          " << n << '\n'
                  << "tags_present     " << tags << '\n'
                  << "json_valid       " << json_ok << '\n'
                  << "schema_complete  " << schema_ok << '\n'
                  << "ordering_ok      " << ordering << '\n';
    }
    return 0;
}

int run_label(const std::string& in_path, const std::string& lexicon_path,
              const std::string& out_path) {
    const LabelerLexicon lexicon =
        lexicon_path.empty() ? builtin_lexicon() : load_lexicon(lexicon_path);

    std::ifstream in(in_path);
    if (!in) throw DataError("cannot open input file: " + in_path);
    auto out = open_output(out_path);
    std::string line;
    std::size_t line_number = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw DataError(in_path + ":" + std::to_string(line_number) + ": invalid JSON");
        }
        if (!doc.contains("findings_text") || !doc["findings_text"].is_string()) {
            throw DataError(in_path + ":" + std::to_string(line_number) +
                            ": missing \"findings_text\"");
        }
        const std::string study_id = doc.value("study_id", std::string("line-") +
                                                               std::to_string(line_number));
        LabelVector labels = extract_labels(doc["findings_text"].get<std::string>(), lexicon);
        nlohmann::json result;
        result["study_id"] = study_id;
        result["provenance"] = provenance_to_string(labels.provenance);
        result["labels"] = labels_to_json(labels);
        out << result.dump() << '\n';
        ++count;
    }
    std::cout << "labeled " << count << " narratives to " << out_path << '\n';
    return 0;
}

int run_reward(const std::string& pred_path, const std::string& ref_path,
               const std::string& config_path, const std::string& out_path,
               const std::string& format) {
    RewardContext ctx;
    if (!config_path.empty()) {
        RewardConfig cfg = RewardConfig::load(config_path);
        ctx.weights = cfg.weights;
        ctx.matrix = cfg.resolve_matrix();
        ctx.lexicon = cfg.resolve_lexicon();
    }
    auto references = read_study_jsonl(ref_path);
    ctx.idf = build_idf(references);
    auto by_id = index_by_id(references);

    auto predictions = read_predictions(pred_path);
    auto out = open_output(out_path);

    RewardBreakdown sums;
    std::map<std::string, int> candidate_counters;
    for (const auto& pred : predictions) {
        auto it = by_id.find(pred.study_id);
        if (it == by_id.end()) {
            throw DataError("prediction references unknown study \"" + pred.study_id + "\"");
        }
        const StudyRecord& study = it->second;
        StructuredOutput parsed = parse_output(pred.raw);
        RewardBreakdown b = total_reward(parsed, study.labels, study.findings_text, ctx);
        nlohmann::json doc = breakdown_to_json(b);
        doc["study_id"] = pred.study_id;
        doc["candidate_index"] = candidate_counters[pred.study_id]++;
        out << doc.dump() << '\n';
        sums.consistency += b.consistency;
        sums.think_accuracy += b.think_accuracy;
        sums.answer_accuracy += b.answer_accuracy;
        sums.semantic += b.semantic;
        sums.format += b.format;
        sums.total += b.total;
    }
    const double n = predictions.empty() ? 1.0 : static_cast<double>(predictions.size());
    if (format == "json") {
        nlohmann::json summary;
        summary["n_candidates"] = predictions.size();
        summary["mean_consistency"] = sums.consistency / n;
        summary["mean_think_accuracy"] = sums.think_accuracy / n;
        summary["mean_answer_accuracy"] = sums.answer_accuracy / n;
        summary["mean_semantic"] = sums.semantic / n;
        summary["mean_format"] = sums.format / n;
        summary["mean_total"] = sums.total / n;
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << std::fixed << std::setprecision(6);
        std::cout << "candidates            " << predictions.size() << '\n'
                  << "mean_consistency      " << sums.consistency / n << '\n'
                  << "mean_think_accuracy   " << sums.think_accuracy / n << '\n'
                  << "mean_answer_accuracy  " << sums.answer_accuracy / n << '\n'
                  << "mean_semantic         " << sums.semantic / n << '\n'
                  << "mean_format           " << sums.format / n << '\n'
                  << "mean_total            " << sums.total / n << '\n';
    }
    return 0;
}

int run_eval(const std::string& pred_path, const std::string& ref_path,
             const std::string& lexicon_path, const std::string& out_path,
             const std::string& format) {
    const LabelerLexicon lexicon =
        lexicon_path.empty() ? builtin_lexicon() : load_lexicon(lexicon_path);
    auto references = read_study_jsonl(ref_path);
    auto by_id = index_by_id(references);
    auto predictions = read_predictions(pred_path);

    std::vector<EvaluationExample> examples;
    examples.reserve(predictions.size());
    for (const auto& pred : predictions) {
        auto it = by_id.find(pred.study_id);
        if (it == by_id.end()) {
            throw DataError("prediction references unknown study \"" + pred.study_id + "\"");
        }
        examples.push_back(
            {parse_output(pred.raw), it->second.labels, it->second.findings_text});
    }
    MetricsReport report = evaluate(examples, lexicon);
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        out << report.to_json_text() << '\n';
    }
    if (format == "json") {
        std::cout << report.to_json_text() << '\n';
    } else {
        std::cout << report.to_table_text();
    }
    return 0;
}

int run_train(const std::string& config_path, const std::string& out_dir_flag,
              std::optional<std::uint64_t> seed) {
    RunConfig cfg = RunConfig::load(config_path);
    if (!out_dir_flag.empty()) cfg.out_dir = out_dir_flag;
    if (cfg.out_dir.empty()) throw ConfigError("no output directory: set out_dir or --out");
    if (seed) cfg.train.seed = *seed;

    auto records = cfg.load_records();
    if (records.empty()) {
        throw DataError("corpus split \"" + cfg.split + "\" selects no studies");
    }
    const auto matrix = cfg.resolve_matrix();
    const auto lexicon = cfg.resolve_lexicon();

    std::filesystem::create_directories(cfg.out_dir);
    const auto dir = std::filesystem::path(cfg.out_dir);

    std::ofstream rewards_log;
    GroupObserver observer;
    if (cfg.log_rewards) {
        rewards_log = open_output((dir / "rewards.jsonl").string());
        observer = [&rewards_log](int iteration, const CandidateGroup& group) {
            for (std::size_t i = 0; i < group.candidates.size(); ++i) {
                nlohmann::json doc = breakdown_to_json(group.candidates[i].reward);
                doc["iteration"] = iteration;
                doc["candidate_index"] = i;
                doc["advantage"] = group.candidates[i].advantage;
                rewards_log << doc.dump() << '\n';
            }
        };
    }

    TrainResult result = train(cfg.train, records, matrix, lexicon, observer);
    result.warm_params.save((dir / "policy_warm_start.json").string());
    result.final_params.save((dir / "policy_final.json").string());
    {
        auto out = open_output((dir / "trace.jsonl").string());
        for (const auto& row : result.trace) out << row.to_json().dump() << '\n';
    }
    {
        auto out = open_output((dir / "train_config.json").string());
        out << cfg.to_json_text() << '\n';
    }
    if (!result.trace.empty()) {
        const auto& last = result.trace.back();
        std::cout << "trained " << result.trace.size() << " iterations on " << records.size()
                  << " studies; final reward_mean " << last.reward_mean << ", kl " << last.kl
                  << ", scs_micro " << last.scs_micro << '\n';
    } else {
        std::cout << "trained 0 iterations (warm start only)\n";
    }
    std::cout << "checkpoints and trace written to " << cfg.out_dir << '\n';
    return 0;
}

void emit_error(int exit_code, const std::string& message) {
    nlohmann::json doc;
    std::istringstream lines(message);
    std::string first;
    std::getline(lines, first);
    nlohmann::json details = nlohmann::json::array();
    std::string line;
    while (std::getline(lines, line)) {
        const std::string trimmed = trim(line);
        if (!trimmed.empty()) details.push_back(trimmed.starts_with("- ") ? trimmed.substr(2)
                                                                          : trimmed);
    }
    doc["error"] = {{"exit_code", exit_code}, {"message", first}, {"details", details}};
    std::cerr << doc.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-consistent report-generation RL toolkit"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed,
                   "Seed for all randomness (default " + std::to_string(kDefaultSeed) + ")");

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic study corpus");
    std::string gen_spec;
    std::string gen_out;
    gen->add_option("--spec", gen_spec, "Corpus spec JSON")->required();
    gen->add_option("--out", gen_out, "Output corpus JSONL")->required();

    // parse
    auto* parse = app.add_subcommand("parse", "Parse raw model outputs into structured records");
    std::string parse_in;
    std::string parse_out;
    std::string parse_format = "table";
    parse->add_option("--in", parse_in, "Raw outputs JSONL ({study_id, raw})")->required();
    parse->add_option("--out", parse_out, "Parsed outputs JSONL")->required();
    parse->add_option("--format", parse_format, "Summary format: json or table")
        ->check(CLI::IsMember({"json", "table"}));

    // label
    auto* label = app.add_subcommand("label", "Extract label vectors from narratives");
    std::string label_in;
    std::string label_lexicon;
    std::string label_out;
    label->add_option("--in", label_in, "JSONL with findings_text fields")->required();
    label->add_option("--lexicon", label_lexicon, "Lexicon JSON (default: built-in)");
    label->add_option("--out", label_out, "Labels JSONL")->required();

    // reward
    auto* reward = app.add_subcommand("reward", "Score candidate outputs against references");
    std::string reward_pred;
    std::string reward_ref;
    std::string reward_config;
    std::string reward_out;
    std::string reward_format = "table";
    reward->add_option("--pred", reward_pred, "Candidate outputs JSONL")->required();
    reward->add_option("--ref", reward_ref, "Reference corpus JSONL")->required();
    reward->add_option("--config", reward_config, "Reward config JSON (weights, matrix, lexicon)");
    reward->add_option("--out", reward_out, "Per-candidate breakdown JSONL")->required();
    reward->add_option("--format", reward_format, "Summary format: json or table")
        ->check(CLI::IsMember({"json", "table"}));

    // eval
    auto* eval = app.add_subcommand("eval", "Compute the evaluation metric suite");
    std::string eval_pred;
    std::string eval_ref;
    std::string eval_lexicon;
    std::string eval_out;
    std::string eval_format = "table";
    eval->add_option("--pred", eval_pred, "Predicted outputs JSONL")->required();
    eval->add_option("--ref", eval_ref, "Reference corpus JSONL")->required();
    eval->add_option("--lexicon", eval_lexicon, "Lexicon JSON (default: built-in)");
    eval->add_option("--out", eval_out, "Metrics report JSON file");
    eval->add_option("--format", eval_format, "Stdout format: json or table")
        ->check(CLI::IsMember({"json", "table"}));

    // train
    auto* train_cmd = app.add_subcommand("train", "Warm start, then run the GRPO loop");
    std::string train_config;
    std::string train_out;
    train_cmd->add_option("--config", train_config, "Run config JSON")->required();
    train_cmd->add_option("--out", train_out, "Output directory (overrides config out_dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        emit_error(1, e.what());
        return 1;
    }

    try {
        if (gen->parsed()) return run_gen_corpus(gen_spec, gen_out, seed);
        if (parse->parsed()) return run_parse(parse_in, parse_out, parse_format);
        if (label->parsed()) return run_label(label_in, label_lexicon, label_out);
        if (reward->parsed()) {
            return run_reward(reward_pred, reward_ref, reward_config, reward_out, reward_format);
        }
        if (eval->parsed()) {
            return run_eval(eval_pred, eval_ref, eval_lexicon, eval_out, eval_format);
        }
        if (train_cmd->parsed()) return run_train(train_config, train_out, seed);
    } catch (const ConfigError& e) {
        emit_error(1, e.what());
        return 1;
    } catch (const NumericalError& e) {
        emit_error(3, e.what());
        return 3;
    } catch (const DataError& e) {
        emit_error(2, e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error(2, e.what());
        return 2;
    }
    return 0;
}

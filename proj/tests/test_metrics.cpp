#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "reportrl/labeler.hpp"
#include "reportrl/metrics.hpp"
#include "reportrl/tokenize.hpp"

using namespace reportrl;

namespace {

using Tokens = std::vector<std::string>;

Tokens toks(const std::string& text) { return tokenize(text); }

// Brute-force modified n-gram precision: enumerate candidate n-grams one by
// one and consume matching reference n-grams.
std::pair<int, int> oracle_ngram_precision(const Tokens& cand, const Tokens& ref,
                                           std::size_t n) {
    std::map<Tokens, int> available;
    if (ref.size() >= n) {
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
            ++available[Tokens(ref.begin() + i, ref.begin() + i + n)];
        }
    }
    int matched = 0;
    int total = 0;
    if (cand.size() >= n) {
        for (std::size_t i = 0; i + n <= cand.size(); ++i) {
            ++total;
            Tokens gram(cand.begin() + i, cand.begin() + i + n);
            auto it = available.find(gram);
            if (it != available.end() && it->second > 0) {
                --it->second;
                ++matched;
            }
        }
    }
    return {matched, total};
}

double oracle_bleu(const Tokens& cand, const Tokens& ref, int n) {
    if (cand.empty()) return 0.0;
    double product = 1.0;
    for (int k = 1; k <= n; ++k) {
        auto [matched, total] = oracle_ngram_precision(cand, ref, static_cast<std::size_t>(k));
        if (total == 0 || matched == 0) return 0.0;
        product *= static_cast<double>(matched) / total;
    }
    const double bp = cand.size() >= ref.size()
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
    return bp * std::pow(product, 1.0 / n);
}

// Plain recursive LCS, exponential but fine for fixture sizes.
std::size_t oracle_lcs(const Tokens& a, const Tokens& b, std::size_t i = 0, std::size_t j = 0) {
    if (i == a.size() || j == b.size()) return 0;
    if (a[i] == b[j]) return 1 + oracle_lcs(a, b, i + 1, j + 1);
    return std::max(oracle_lcs(a, b, i + 1, j), oracle_lcs(a, b, i, j + 1));
}

}  // namespace

TEST_CASE("bleu is 1 on identical and 0 on disjoint sequences") {
    const Tokens text = toks("the lungs are clear without effusion");
    for (int n = 1; n <= 4; ++n) {
        CHECK(bleu_n(text, text, n) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(bleu_n(text, toks("cardiomegaly pneumothorax edema opacity fracture nodule"), n) ==
              0.0);
    }
    CHECK(bleu_n({}, text, 2) == 0.0);
    CHECK_THROWS_AS((void)bleu_n(text, text, 5), std::invalid_argument);
}

TEST_CASE("six-token single-substitution fixture matches the counting oracle") {
    const Tokens cand = toks("the cat sat on the mat");
    const Tokens ref = toks("the dog sat on the mat");
    // hand arithmetic: p1 = 5/6, p2 = 3/5, p3 = 2/4, p4 = 1/3, no brevity penalty
    CHECK(bleu_n(cand, ref, 1) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(bleu_n(cand, ref, 2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(bleu_n(cand, ref, 3) == doctest::Approx(std::pow(0.25, 1.0 / 3.0)).epsilon(1e-12));
    CHECK(bleu_n(cand, ref, 4) ==
          doctest::Approx(std::pow(1.0 / 12.0, 0.25)).epsilon(1e-12));
    for (int n = 1; n <= 4; ++n) {
        CHECK(bleu_n(cand, ref, n) == doctest::Approx(oracle_bleu(cand, ref, n)).epsilon(1e-12));
    }
}

TEST_CASE("brevity penalty applies to short candidates") {
    const Tokens cand = toks("the cat sat");
    const Tokens ref = toks("the cat sat on the mat");
    const double expected_bp = std::exp(1.0 - 6.0 / 3.0);
    CHECK(bleu_n(cand, ref, 1) == doctest::Approx(expected_bp).epsilon(1e-12));
}

TEST_CASE("bleu agrees with the oracle on random token strings") {
    std::mt19937 rng(31);
    const char* vocab[] = {"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 200; ++trial) {
        auto make = [&](int max_len) {
            Tokens t;
            const int len = static_cast<int>(rng() % max_len);
            for (int i = 0; i < len; ++i) t.push_back(vocab[rng() % std::size(vocab)]);
            return t;
        };
        const Tokens cand = make(12);
        const Tokens ref = make(12);
        for (int n = 1; n <= 4; ++n) {
            CHECK(bleu_n(cand, ref, n) ==
                  doctest::Approx(oracle_bleu(cand, ref, n)).epsilon(1e-9));
        }
    }
}

TEST_CASE("losing a matched token never raises bleu") {
    std::mt19937 rng(37);
    const char* vocab[] = {"x", "y", "z", "w"};
    for (int trial = 0; trial < 100; ++trial) {
        Tokens ref;
        Tokens cand;
        for (int i = 0; i < 8; ++i) ref.push_back(vocab[rng() % std::size(vocab)]);
        for (int i = 0; i < 6 + static_cast<int>(rng() % 3); ++i) {
            cand.push_back(vocab[rng() % std::size(vocab)]);
        }
        // degrading any position to an out-of-vocabulary token can only
        // remove n-gram matches, never add them
        Tokens degraded = cand;
        degraded[rng() % degraded.size()] = "oov";
        for (int n = 1; n <= 4; ++n) {
            CHECK(bleu_n(degraded, ref, n) <= bleu_n(cand, ref, n) + 1e-12);
        }
    }
}

TEST_CASE("rouge_l fixtures and symmetry") {
    CHECK(rouge_l(toks("a b c d"), toks("a b c d")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rouge_l(toks("a b"), toks("c d")) == 0.0);
    CHECK(rouge_l({}, toks("a")) == 0.0);
    CHECK(rouge_l(toks("a"), {}) == 0.0);
    // LCS("a b c d", "a c d e") = 3 -> P = 3/4, R = 3/4, F = 3/4
    CHECK(rouge_l(toks("a b c d"), toks("a c d e")) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(oracle_lcs(toks("a b c d"), toks("a c d e")) == 3);

    std::mt19937 rng(41);
    const char* vocab[] = {"a", "b", "c"};
    for (int trial = 0; trial < 100; ++trial) {
        Tokens s;
        Tokens t;
        for (int i = 0; i < static_cast<int>(rng() % 9); ++i) {
            s.push_back(vocab[rng() % 3]);
        }
        for (int i = 0; i < static_cast<int>(rng() % 9); ++i) {
            t.push_back(vocab[rng() % 3]);
        }
        CHECK(rouge_l(s, t) == doctest::Approx(rouge_l(t, s)).epsilon(1e-12));
        if (!s.empty() && !t.empty()) {
            const double lcs = static_cast<double>(oracle_lcs(s, t));
            const double expected =
                lcs == 0.0 ? 0.0
                           : 2.0 * (lcs / s.size()) * (lcs / t.size()) /
                                 (lcs / s.size() + lcs / t.size());
            CHECK(rouge_l(s, t) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

namespace {

LabelVector vec(std::initializer_list<std::pair<Category, LabelValue>> entries) {
    LabelVector v = make_label_vector(LabelValue::Negative, Provenance::GroundTruth);
    for (const auto& [c, value] : entries) v.set(c, value);
    return v;
}

}  // namespace

TEST_CASE("multilabel f1 fixtures") {
    SUBCASE("perfect prediction with support everywhere") {
        std::vector<LabelVector> truths;
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            LabelVector v = make_label_vector(LabelValue::Negative, Provenance::GroundTruth);
            v.values[c] = LabelValue::Positive;
            truths.push_back(v);
        }
        CHECK(multilabel_f1(truths, truths, F1Mode::Macro) == doctest::Approx(1.0));
        CHECK(multilabel_f1(truths, truths, F1Mode::Micro) == doctest::Approx(1.0));
    }
    SUBCASE("all-negative predictions against positive truths") {
        std::vector<LabelVector> truths = {vec({{Category::Edema, LabelValue::Positive}}),
                                           vec({{Category::Pneumonia, LabelValue::Positive}})};
        std::vector<LabelVector> preds = {vec({}), vec({})};
        CHECK(multilabel_f1(preds, truths, F1Mode::Macro) == 0.0);
        CHECK(multilabel_f1(preds, truths, F1Mode::Micro) == 0.0);
    }
    SUBCASE("hand confusion arithmetic on a 4-study, 3-category fixture") {
        using C = Category;
        std::vector<LabelVector> truths = {
            vec({{C::Edema, LabelValue::Positive}, {C::Pneumonia, LabelValue::Positive}}),
            vec({{C::Edema, LabelValue::Positive}}),
            vec({{C::Atelectasis, LabelValue::Positive}}),
            vec({}),
        };
        std::vector<LabelVector> preds = {
            vec({{C::Edema, LabelValue::Positive}}),
            vec({{C::Edema, LabelValue::Positive}, {C::Pneumonia, LabelValue::Positive}}),
            vec({{C::Atelectasis, LabelValue::Uncertain}}),
            vec({{C::Atelectasis, LabelValue::Positive}}),
        };
        // Edema: TP=2 FP=0 FN=0 -> F1 = 1
        // Pneumonia: TP=0 FP=1 FN=1 -> F1 = 0
        // Atelectasis: TP=0 FP=1 FN=1 -> F1 = 0 (uncertain counts non-positive)
        // all other categories have no support and are skipped
        CHECK(multilabel_f1(preds, truths, F1Mode::Macro) ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        // micro: TP=2, FP=2, FN=2 -> 2*2 / (4+2+2) = 0.5
        CHECK(multilabel_f1(preds, truths, F1Mode::Micro) ==
              doctest::Approx(0.5).epsilon(1e-12));

        SUBCASE("uncertain-as-positive flips the atelectasis cell") {
            // Atelectasis becomes TP=1 FP=1 FN=0 -> F1 = 2/3;
            // macro = (1 + 0 + 2/3) / 3 = 5/9, micro = 2*3 / (6+2+1) = 2/3
            CHECK(multilabel_f1(preds, truths, F1Mode::Macro, UncertainPolicy::Positive) ==
                  doctest::Approx(5.0 / 9.0).epsilon(1e-12));
            CHECK(multilabel_f1(preds, truths, F1Mode::Micro, UncertainPolicy::Positive) ==
                  doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        }
    }
    SUBCASE("length mismatch throws") {
        std::vector<LabelVector> one = {vec({})};
        std::vector<LabelVector> two = {vec({}), vec({})};
        CHECK_THROWS_AS((void)multilabel_f1(one, two, F1Mode::Macro), std::invalid_argument);
    }
    SUBCASE("empty pool counts as vacuous agreement") {
        std::vector<LabelVector> both = {vec({}), vec({})};
        CHECK(multilabel_f1(both, both, F1Mode::Macro) == 1.0);
        CHECK(multilabel_f1(both, both, F1Mode::Micro) == 1.0);
    }
}

TEST_CASE("self consistency") {
    const auto& lexicon = builtin_lexicon();

    SUBCASE("answers equal to extracted narratives give exactly 1.0") {
        std::vector<StructuredOutput> outputs;
        const std::string thinks[] = {
            "Pulmonary edema is present.",
            "No acute cardiopulmonary process.",
            "Possible pneumonia. There is a small right pleural effusion.",
        };
        for (const auto& think : thinks) {
            outputs.push_back(parse_output(render_output(think, extract_labels(think))));
        }
        auto [macro, micro] = self_consistency(outputs, lexicon);
        CHECK(macro == 1.0);
        CHECK(micro == 1.0);
    }
    SUBCASE("complemented answers on active categories hit 0 micro") {
        std::vector<StructuredOutput> outputs;
        const std::string think = "Pulmonary edema is present.";
        LabelVector lie = extract_labels(think);
        lie.set(Category::Edema, LabelValue::Negative);   // was positive
        lie.set(Category::NoFinding, LabelValue::Positive);  // was negative
        outputs.push_back(parse_output(render_output(think, lie)));
        auto [macro, micro] = self_consistency(outputs, lexicon);
        CHECK(micro == 0.0);
        CHECK(macro == 0.0);
    }
    SUBCASE("missing answer blocks count as all-non-positive") {
        std::vector<StructuredOutput> outputs = {
            parse_output("<think>Pulmonary edema is present.</think>")};
        auto [macro, micro] = self_consistency(outputs, lexicon);
        CHECK(micro == 0.0);
        CHECK(macro == 0.0);
    }
}

TEST_CASE("evaluate pipeline on a self-consistent corpus") {
    const auto& lexicon = builtin_lexicon();
    std::vector<EvaluationExample> examples;
    const std::string thinks[] = {
        "Pulmonary edema is present.",
        "No acute cardiopulmonary process.",
        "Atelectasis is present in the lung bases. Possible pneumonia.",
    };
    for (const auto& think : thinks) {
        EvaluationExample ex;
        ex.output = parse_output(render_output(think, extract_labels(think)));
        ex.truth_labels = extract_labels(think);
        ex.reference_text = think;
        examples.push_back(ex);
    }
    MetricsReport report = evaluate(examples, lexicon);
    for (double b : report.bleu) CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.rouge_l == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.report_macro_f1 == doctest::Approx(1.0));
    CHECK(report.report_micro_f1 == doctest::Approx(1.0));
    CHECK(report.answer_macro_f1 == doctest::Approx(1.0));
    CHECK(report.answer_micro_f1 == doctest::Approx(1.0));
    CHECK(report.scs_macro == doctest::Approx(1.0));
    CHECK(report.scs_micro == doctest::Approx(1.0));
    CHECK(report.n_examples == 3);

    const std::string json = report.to_json_text();
    CHECK(json.find("\"scs_micro\"") != std::string::npos);
    const std::string table = report.to_table_text();
    CHECK(table.find("answer_micro_f1") != std::string::npos);
    CHECK(table.find("100.00") != std::string::npos);
}

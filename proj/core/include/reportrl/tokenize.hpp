#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reportrl {

// Lowercase tokens, split on non-alphanumeric runs. The one tokenizer used
// by the labeler, the semantic reward, the text metrics, and IDF building,
// so their vocabularies agree.
std::vector<std::string> tokenize(std::string_view text);

// idf(t) = log((N + 1) / (df(t) + 1)) + 1 over the reference documents.
// Unseen tokens at query time score with df = 0.
class IdfTable {
  public:
    IdfTable() = default;

    static IdfTable build(const std::vector<std::string>& documents);

    double idf(const std::string& token) const;
    std::size_t document_count() const { return n_documents_; }
    const std::unordered_map<std::string, std::size_t>& document_frequencies() const {
        return df_;
    }

    static IdfTable from_counts(std::size_t n_documents,
                                std::unordered_map<std::string, std::size_t> df);

  private:
    std::size_t n_documents_ = 0;
    std::unordered_map<std::string, std::size_t> df_;
};

}  // namespace reportrl

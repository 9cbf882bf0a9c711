#include "reportrl/tokenize.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

namespace reportrl {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

IdfTable IdfTable::build(const std::vector<std::string>& documents) {
    IdfTable table;
    table.n_documents_ = documents.size();
    for (const auto& doc : documents) {
        std::unordered_set<std::string> seen;
        for (auto& token : tokenize(doc)) seen.insert(std::move(token));
        for (const auto& token : seen) ++table.df_[token];
    }
    return table;
}

double IdfTable::idf(const std::string& token) const {
    auto it = df_.find(token);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((static_cast<double>(n_documents_) + 1.0) / (df + 1.0)) + 1.0;
}

IdfTable IdfTable::from_counts(std::size_t n_documents,
                               std::unordered_map<std::string, std::size_t> df) {
    IdfTable table;
    table.n_documents_ = n_documents;
    table.df_ = std::move(df);
    return table;
}

}  // namespace reportrl

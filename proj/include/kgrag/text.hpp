#pragma once

#include <set>
#include <string>
#include <vector>

namespace kgrag::text {

// Lowercase, split on non-alphanumerics, but keep intra-token hyphens so
// biomarker names like "p-tau-217" stay whole.
std::vector<std::string> tokenize(const std::string& s);

// Tokens with stopwords removed; the unit fed to the TF-IDF vectorizer.
std::vector<std::string> tokenize_filtered(const std::string& s,
                                           const std::set<std::string>& stopwords);

// Unigrams plus adjacent bigrams ("insulin resistance") over a token stream.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens);

// Non-overlapping, case-insensitive occurrences of a phrase, matched on
// token boundaries.
int count_phrase(const std::vector<std::string>& doc_tokens, const std::string& phrase);

std::string lowercase(const std::string& s);
std::string trim(const std::string& s);
// Collapse internal whitespace runs to single spaces and trim.
std::string normalize_ws(const std::string& s);

std::set<std::string> load_stopwords(const std::string& path);
// Built-in English list; the shipped data file mirrors it.
const std::set<std::string>& default_stopwords();

// Naive sentence splitter: breaks on ./!/? followed by whitespace.
std::vector<std::string> split_sentences(const std::string& s);

}  // namespace kgrag::text

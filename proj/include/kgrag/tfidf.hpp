#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kgrag {

// Sparse row: (feature index, weight) pairs sorted by index, L2-normalized.
using SparseVec = std::vector<std::pair<int, double>>;

// TF-IDF vectorizer over unigrams (and optionally adjacent bigrams) with
// stopword removal. Scheme: raw term frequency times smoothed idf
// ln((1+N)/(1+df)) + 1, rows L2-normalized. Weights are non-negative, so
// cosines between transformed rows land in [0,1].
class TfidfModel {
  public:
    struct Options {
        int min_df = 1;
        bool bigrams = true;
        bool use_stopwords = true;
    };

    static TfidfModel fit(const std::vector<std::string>& texts, const Options& opts,
                          const std::set<std::string>& stopwords);

    SparseVec transform(const std::string& text) const;

    static double cosine(const SparseVec& a, const SparseVec& b);

    std::size_t vocabulary_size() const { return vocab_.size(); }

  private:
    Options opts_;
    std::set<std::string> stopwords_;
    std::map<std::string, int> vocab_;  // feature -> index, lexicographic
    std::vector<double> idf_;           // by index

    std::vector<std::string> features_of(const std::string& text) const;
};

}  // namespace kgrag

#include "kgrag/tfidf.hpp"

#include <algorithm>
#include <cmath>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::vector<std::string> TfidfModel::features_of(const std::string& text) const {
    std::vector<std::string> tokens =
        opts_.use_stopwords ? text::tokenize_filtered(text, stopwords_) : text::tokenize(text);
    return opts_.bigrams ? text::ngrams(tokens) : tokens;
}

TfidfModel TfidfModel::fit(const std::vector<std::string>& texts, const Options& opts,
                           const std::set<std::string>& stopwords) {
    TfidfModel m;
    m.opts_ = opts;
    m.stopwords_ = stopwords;

    std::map<std::string, int> df;
    for (const auto& t : texts) {
        auto feats = m.features_of(t);
        std::sort(feats.begin(), feats.end());
        feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
        for (auto& f : feats) ++df[f];
    }

    int idx = 0;
    const double n = static_cast<double>(texts.size());
    std::vector<double> idf;
    for (auto& [feat, count] : df) {
        if (count < opts.min_df) continue;
        m.vocab_.emplace(feat, idx++);
        idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
    }
    m.idf_ = std::move(idf);
    if (m.vocab_.empty()) {
        throw ConfigError("TF-IDF vocabulary is empty after min_df/stopword filtering");
    }
    return m;
}

SparseVec TfidfModel::transform(const std::string& text) const {
    std::map<int, double> tf;
    for (auto& f : features_of(text)) {
        auto it = vocab_.find(f);
        if (it != vocab_.end()) tf[it->second] += 1.0;
    }
    SparseVec row;
    row.reserve(tf.size());
    double norm_sq = 0.0;
    for (auto& [i, count] : tf) {
        double w = count * idf_[static_cast<std::size_t>(i)];
        row.emplace_back(i, w);
        norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [i, w] : row) w *= inv;
    }
    return row;
}

double TfidfModel::cosine(const SparseVec& a, const SparseVec& b) {
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return dot;  // rows are unit-length (or zero)
}

}  // namespace kgrag

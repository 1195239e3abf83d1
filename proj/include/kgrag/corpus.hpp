#pragma once

#include <set>
#include <string>
#include <vector>

namespace kgrag {

struct Document {
    std::string id;
    std::string title;
    std::string abstract_text;
    int word_count = 0;  // whitespace-delimited tokens of the abstract
};

struct TermLists {
    std::vector<std::string> causality;
    std::vector<std::string> phenotype;
    std::vector<std::string> biomarker;
};

struct FeatureVector {
    double s_caus = 0.0, s_pheno = 0.0, s_biom = 0.0;  // cosines, in [0,1]
    int k_caus = 0, k_pheno = 0, k_biom = 0;           // exact phrase hits
    int k_tot = 0;
};

struct RankingWeights {
    double w_caus = 0.4;
    double w_pheno = 0.2;
    double w_biom = 0.2;
    double w_kw = 0.2;
};

struct RankedDocument {
    Document doc;
    FeatureVector features;
    // minmax-normalized (s_caus, s_pheno, s_biom, k_tot), each in [0,1]
    double norm[4] = {0, 0, 0, 0};
    double score = 0.0;
};

int count_words(const std::string& s);

// Parse a JSONL corpus (id, title, abstract per line) and drop abstracts
// shorter than min_words. Input order is preserved. Duplicate ids and
// malformed lines are rejected.
std::vector<Document> ingest_documents(const std::string& path, int min_words = 180);

TermLists load_term_lists(const std::string& path);

// TF-IDF (unigram+bigram, stopwords, min_df) over title+" "+abstract, the
// three term lists transformed into the same space, per-document cosines
// against each query vector plus exact phrase counts.
std::vector<FeatureVector> compute_features(const std::vector<Document>& docs,
                                            const TermLists& terms, int min_df = 2,
                                            const std::set<std::string>* stopwords = nullptr);

// (v - min) / (max - min); constant input maps to all zeros.
std::vector<double> minmax_normalize(const std::vector<double>& values);

// Normalize each feature column, apply the weighted sum, sort descending by
// score with ties broken by ascending document id.
std::vector<RankedDocument> rank_documents(const std::vector<Document>& docs,
                                           const std::vector<FeatureVector>& features,
                                           const RankingWeights& weights);

std::vector<RankedDocument> select_top_k(const std::vector<RankedDocument>& ranked, int k);

void write_ranked_jsonl(const std::vector<RankedDocument>& ranked, const std::string& path);

}  // namespace kgrag

#include "kgrag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"
#include "kgrag/tfidf.hpp"

namespace kgrag {

using nlohmann::json;

int count_words(const std::string& s) {
    std::istringstream in(s);
    std::string w;
    int n = 0;
    while (in >> w) ++n;
    return n;
}

std::vector<Document> ingest_documents(const std::string& path, int min_words) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file: " + path);

    std::vector<Document> docs;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("title") ||
            !j.contains("abstract")) {
            throw ParseError("corpus line " + std::to_string(lineno) +
                             ": record must have id, title, abstract");
        }
        Document d;
        try {
            d.id = j.at("id").get<std::string>();
            d.title = j.at("title").get<std::string>();
            d.abstract_text = j.at("abstract").get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(d.id).second) {
            throw ValidationError("duplicate document id '" + d.id + "' at line " +
                                  std::to_string(lineno));
        }
        d.word_count = count_words(d.abstract_text);
        if (d.word_count >= min_words) docs.push_back(std::move(d));
    }
    return docs;
}

TermLists load_term_lists(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open term list file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("term lists: ") + e.what());
    }
    auto read_list = [&](const char* key) {
        if (!j.contains(key)) throw ValidationError(std::string("term lists missing key ") + key);
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (auto& v : j.at(key)) {
            std::string s = text::trim(text::lowercase(v.get<std::string>()));
            if (!s.empty() && seen.insert(s).second) out.push_back(s);
        }
        if (out.empty()) throw ValidationError(std::string("term list ") + key + " is empty");
        return out;
    };
    TermLists t;
    t.causality = read_list("causality");
    t.phenotype = read_list("phenotype");
    t.biomarker = read_list("biomarker");
    return t;
}

std::vector<FeatureVector> compute_features(const std::vector<Document>& docs,
                                            const TermLists& terms, int min_df,
                                            const std::set<std::string>* stopwords) {
    if (docs.empty()) throw ValidationError("compute_features: empty corpus");
    if (min_df < 1) throw ValidationError("compute_features: min_df must be >= 1");
    const std::set<std::string>& sw = stopwords ? *stopwords : text::default_stopwords();

    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& d : docs) texts.push_back(d.title + " " + d.abstract_text);

    TfidfModel::Options opts;
    opts.min_df = min_df;
    auto model = TfidfModel::fit(texts, opts, sw);

    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& p : v) {
            if (!s.empty()) s += " ";
            s += p;
        }
        return s;
    };
    SparseVec q_caus = model.transform(join(terms.causality));
    SparseVec q_pheno = model.transform(join(terms.phenotype));
    SparseVec q_biom = model.transform(join(terms.biomarker));

    std::vector<FeatureVector> out;
    out.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        SparseVec x = model.transform(texts[i]);
        FeatureVector f;
        f.s_caus = TfidfModel::cosine(x, q_caus);
        f.s_pheno = TfidfModel::cosine(x, q_pheno);
        f.s_biom = TfidfModel::cosine(x, q_biom);
        auto doc_tokens = text::tokenize(texts[i]);
        for (const auto& p : terms.causality) f.k_caus += text::count_phrase(doc_tokens, p);
        for (const auto& p : terms.phenotype) f.k_pheno += text::count_phrase(doc_tokens, p);
        for (const auto& p : terms.biomarker) f.k_biom += text::count_phrase(doc_tokens, p);
        f.k_tot = f.k_caus + f.k_pheno + f.k_biom;
        out.push_back(f);
    }
    return out;
}

std::vector<double> minmax_normalize(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("minmax_normalize: empty input");
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(values.size(), 0.0);
    if (mx > mn) {
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mn) / (mx - mn);
    }
    return out;
}

std::vector<RankedDocument> rank_documents(const std::vector<Document>& docs,
                                           const std::vector<FeatureVector>& features,
                                           const RankingWeights& weights) {
    if (docs.size() != features.size()) {
        throw ValidationError("rank_documents: docs and features differ in length");
    }
    if (docs.empty()) return {};
    std::vector<double> col[4];
    for (const auto& f : features) {
        col[0].push_back(f.s_caus);
        col[1].push_back(f.s_pheno);
        col[2].push_back(f.s_biom);
        col[3].push_back(static_cast<double>(f.k_tot));
    }
    std::vector<std::vector<double>> norm;
    for (auto& c : col) norm.push_back(minmax_normalize(c));

    std::vector<RankedDocument> out;
    out.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        RankedDocument r;
        r.doc = docs[i];
        r.features = features[i];
        for (int c = 0; c < 4; ++c) r.norm[c] = norm[static_cast<std::size_t>(c)][i];
        r.score = weights.w_caus * r.norm[0] + weights.w_pheno * r.norm[1] +
                  weights.w_biom * r.norm[2] + weights.w_kw * r.norm[3];
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedDocument& a, const RankedDocument& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc.id < b.doc.id;
    });
    return out;
}

std::vector<RankedDocument> select_top_k(const std::vector<RankedDocument>& ranked, int k) {
    if (k < 0) throw ValidationError("select_top_k: k must be >= 0");
    std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(k));
    return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n)};
}

void write_ranked_jsonl(const std::vector<RankedDocument>& ranked, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write ranked output: " + path);
    for (const auto& r : ranked) {
        json j{{"id", r.doc.id},
               {"title", r.doc.title},
               {"abstract", r.doc.abstract_text},
               {"word_count", r.doc.word_count},
               {"score", r.score},
               {"s_caus", r.features.s_caus},
               {"s_pheno", r.features.s_pheno},
               {"s_biom", r.features.s_biom},
               {"k_caus", r.features.k_caus},
               {"k_pheno", r.features.k_pheno},
               {"k_biom", r.features.k_biom},
               {"k_tot", r.features.k_tot},
               {"normalized", {r.norm[0], r.norm[1], r.norm[2], r.norm[3]}}};
        out << j.dump() << "\n";
    }
}

}  // namespace kgrag

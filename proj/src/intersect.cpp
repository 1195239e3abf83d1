#include "kgrag/intersect.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

using nlohmann::json;

TfidfTripleEncoder::TfidfTripleEncoder(const std::vector<std::string>& corpus)
    : model_(TfidfModel::fit(corpus,
                             TfidfModel::Options{.min_df = 1, .bigrams = false,
                                                 .use_stopwords = false},
                             {})) {}

SparseVec TfidfTripleEncoder::embed(const std::string& verbalization) const {
    return model_.transform(verbalization);
}

SparseVec embed_triple(const CanonicalTriple& t, const TripleEncoder& encoder) {
    std::string v = text::normalize_ws(verbalize(t));
    if (v == "." || v.empty()) throw ValidationError("embed_triple: empty verbalization");
    return encoder.embed(v);
}

namespace {

std::string dedup_key(const CanonicalTriple& t) {
    // Stopword-stripped verbalization of the a-side triple.
    auto toks = text::tokenize_filtered(verbalize(t), text::default_stopwords());
    std::string key;
    for (const auto& tok : toks) {
        if (!key.empty()) key += " ";
        key += tok;
    }
    return key;
}

}  // namespace

std::vector<IntersectionItem> intersect_graphs(const KnowledgeGraph& ga,
                                               const KnowledgeGraph& gb,
                                               const TripleEncoder& encoder, double threshold) {
    // threshold > 1 is allowed and yields the empty set; <= 0 is not.
    if (threshold <= 0.0) throw ValidationError("intersect: threshold must be > 0");
    auto ta = ga.causal_triples();
    auto tb = gb.causal_triples();
    if (ta.empty() || tb.empty()) return {};

    auto as_triple = [](const GraphEdge& e) {
        Provenance p = e.provenances.empty() ? Provenance{} : e.provenances.front();
        return CanonicalTriple{e.head, e.relation, e.tail, p};
    };

    std::vector<SparseVec> va, vb;
    std::vector<CanonicalTriple> ca, cb;
    for (const auto& e : ta) {
        ca.push_back(as_triple(e));
        va.push_back(embed_triple(ca.back(), encoder));
    }
    for (const auto& e : tb) {
        cb.push_back(as_triple(e));
        vb.push_back(embed_triple(cb.back(), encoder));
    }

    std::vector<IntersectionItem> candidates;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t j = 0; j < cb.size(); ++j) {
            double sim = TfidfModel::cosine(va[i], vb[j]);
            if (sim >= threshold) candidates.push_back({ca[i], cb[j], sim});
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const IntersectionItem& x, const IntersectionItem& y) {
                  if (x.similarity != y.similarity) return x.similarity > y.similarity;
                  auto kx = verbalize(x.triple_a) + "|" + verbalize(x.triple_b);
                  auto ky = verbalize(y.triple_a) + "|" + verbalize(y.triple_b);
                  return kx < ky;
              });

    // De-duplicate: keep the best-ranked item per a-side canonical fact.
    std::vector<IntersectionItem> out;
    std::map<std::string, bool> seen;
    for (auto& item : candidates) {
        std::string key = dedup_key(item.triple_a);
        if (seen.emplace(key, true).second) out.push_back(std::move(item));
    }
    return out;
}

std::vector<IntersectionItem> intersect_graphs(const KnowledgeGraph& ga,
                                               const KnowledgeGraph& gb, double threshold) {
    std::vector<std::string> corpus;
    for (const auto& e : ga.causal_triples()) corpus.push_back(verbalize(e));
    for (const auto& e : gb.causal_triples()) corpus.push_back(verbalize(e));
    if (corpus.empty()) return {};
    TfidfTripleEncoder encoder(corpus);
    return intersect_graphs(ga, gb, encoder, threshold);
}

namespace {

json triple_to_json(const CanonicalTriple& t) {
    return {{"Entity 1", t.head},
            {"Relationship", t.relation},
            {"Entity 2", t.tail},
            {"provenance",
             {{"paper_id", t.provenance.paper_id},
              {"sentence_id", t.provenance.sentence_id},
              {"clause_id", t.provenance.clause_id}}}};
}

CanonicalTriple triple_from_json(const json& j) {
    CanonicalTriple t;
    t.head = j.at("Entity 1").get<std::string>();
    t.relation = j.at("Relationship").get<std::string>();
    t.tail = j.at("Entity 2").get<std::string>();
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        t.provenance = Provenance{p.value("paper_id", ""), p.value("sentence_id", 0),
                                  p.value("clause_id", 0)};
    }
    return t;
}

}  // namespace

std::vector<IntersectionItem> read_intersection(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open intersection file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("intersection " + path + ": " + e.what());
    }
    std::vector<IntersectionItem> items;
    for (const auto& it : j.at("items")) {
        items.push_back({triple_from_json(it.at("a")), triple_from_json(it.at("b")),
                         it.at("similarity").get<double>()});
    }
    return items;
}

void write_intersection(const std::vector<IntersectionItem>& items, const std::string& path) {
    json arr = json::array();
    for (const auto& it : items) {
        arr.push_back({{"a", triple_to_json(it.triple_a)},
                       {"b", triple_to_json(it.triple_b)},
                       {"similarity", it.similarity}});
    }
    json j{{"items", arr}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write intersection file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace kgrag

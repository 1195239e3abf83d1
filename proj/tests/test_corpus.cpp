#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgrag/corpus.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/rng.hpp"

using namespace kgrag;
namespace fs = std::filesystem;

namespace {

std::string abstract_of(int words) {
    std::ostringstream os;
    for (int i = 0; i < words; ++i) os << (i ? " " : "") << "w" << i;
    return os.str();
}

fs::path write_tmp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("ingest keeps only abstracts with at least min_words words") {
    std::ostringstream os;
    os << R"({"id":"d179","title":"t","abstract":")" << abstract_of(179) << "\"}\n";
    os << R"({"id":"d180","title":"t","abstract":")" << abstract_of(180) << "\"}\n";
    os << R"({"id":"d181","title":"t","abstract":")" << abstract_of(181) << "\"}\n";
    auto p = write_tmp("kgrag_corpus_boundary.jsonl", os.str());
    auto docs = ingest_documents(p.string(), 180);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "d180");
    CHECK(docs[1].id == "d181");
}

TEST_CASE("ingest rejects duplicate ids and malformed lines") {
    auto dup = write_tmp("kgrag_corpus_dup.jsonl",
                         R"({"id":"a","title":"t","abstract":"x"})"
                         "\n"
                         R"({"id":"a","title":"t","abstract":"y"})"
                         "\n");
    CHECK_THROWS_AS(ingest_documents(dup.string(), 0), ValidationError);
    auto bad = write_tmp("kgrag_corpus_bad.jsonl", "{not json}\n");
    CHECK_THROWS_AS(ingest_documents(bad.string(), 0), ParseError);
}

TEST_CASE("count_words counts whitespace-delimited tokens") {
    CHECK(count_words("one two  three\nfour") == 4);
    CHECK(count_words("   ") == 0);
}

TEST_CASE("minmax_normalize fixed examples") {
    CHECK(minmax_normalize({1, 3}) == std::vector<double>{0, 1});
    CHECK(minmax_normalize({5, 5, 5}) == std::vector<double>{0, 0, 0});
    CHECK(minmax_normalize({2, 4, 6}) == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("rank ties break by ascending document id") {
    std::vector<Document> docs = {{"B", "t", "x", 1}, {"A", "t", "x", 1}};
    std::vector<FeatureVector> feats(2);  // identical features -> identical scores
    auto ranked = rank_documents(docs, feats, {});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].doc.id == "A");
    CHECK(ranked[1].doc.id == "B");
}

TEST_CASE("weights (1,0,0,0) rank purely by the causal cosine") {
    std::vector<Document> docs = {{"a", "", "", 0}, {"b", "", "", 0}, {"c", "", "", 0}};
    std::vector<FeatureVector> feats(3);
    feats[0].s_caus = 0.2;
    feats[1].s_caus = 0.9;
    feats[2].s_caus = 0.5;
    feats[0].k_tot = 50;  // would dominate under default weights
    auto ranked = rank_documents(docs, feats, {1, 0, 0, 0});
    CHECK(ranked[0].doc.id == "b");
    CHECK(ranked[1].doc.id == "c");
    CHECK(ranked[2].doc.id == "a");
}

TEST_CASE("raising one normalized feature never lowers a document's rank") {
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 3 + static_cast<int>(rng.below(6));
        std::vector<Document> docs;
        std::vector<FeatureVector> feats;
        for (int i = 0; i < n; ++i) {
            docs.push_back({"d" + std::to_string(i), "", "", 0});
            FeatureVector f;
            f.s_caus = rng.uniform01();
            f.s_pheno = rng.uniform01();
            f.s_biom = rng.uniform01();
            f.k_tot = static_cast<int>(rng.below(20));
            feats.push_back(f);
        }
        RankingWeights w{0.1 + rng.uniform01(), 0.1 + rng.uniform01(), 0.1 + rng.uniform01(),
                         0.1 + rng.uniform01()};
        auto before = rank_documents(docs, feats, w);
        int target = static_cast<int>(rng.below(n));
        auto rank_of = [&](const std::vector<RankedDocument>& r, const std::string& id) {
            for (std::size_t i = 0; i < r.size(); ++i)
                if (r[i].doc.id == id) return static_cast<int>(i);
            return -1;
        };
        int pos_before = rank_of(before, docs[target].id);
        // bump one raw feature of the target upward; its rank must not drop
        switch (rng.below(4)) {
            case 0: feats[target].s_caus += 0.5; break;
            case 1: feats[target].s_pheno += 0.5; break;
            case 2: feats[target].s_biom += 0.5; break;
            default: feats[target].k_tot += 10; break;
        }
        auto after = rank_documents(docs, feats, w);
        REQUIRE(rank_of(after, docs[target].id) <= pos_before);
    }
}

TEST_CASE("compute_features yields cosines in [0,1] and exact keyword counts") {
    std::vector<Document> docs = {
        {"a", "Insulin study", "insulin resistance causes cognitive decline in adults", 7},
        {"b", "Control study", "control cohorts were followed over time repeatedly", 7}};
    TermLists terms;
    terms.causality = {"causes"};
    terms.phenotype = {"cognitive decline", "insulin resistance"};
    terms.biomarker = {"hba1c"};
    auto feats = compute_features(docs, terms, 1);
    REQUIRE(feats.size() == 2);
    CHECK(feats[0].k_caus == 1);
    CHECK(feats[0].k_pheno == 2);
    CHECK(feats[0].k_biom == 0);
    CHECK(feats[0].k_tot == 3);
    CHECK(feats[1].k_tot == 0);
    CHECK(feats[0].s_caus > feats[1].s_caus);
    for (const auto& f : feats) {
        for (double s : {f.s_caus, f.s_pheno, f.s_biom}) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("select_top_k truncates and ranked output round-trips as JSONL") {
    std::vector<Document> docs = {{"a", "", "", 0}, {"b", "", "", 0}, {"c", "", "", 0}};
    std::vector<FeatureVector> feats(3);
    feats[1].s_caus = 1.0;
    auto ranked = rank_documents(docs, feats, {});
    auto top = select_top_k(ranked, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].doc.id == "b");
    auto p = fs::temp_directory_path() / "kgrag_ranked_out.jsonl";
    write_ranked_jsonl(top, p.string());
    std::ifstream in(p);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 2);
}

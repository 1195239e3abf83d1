#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "kgrag/errors.hpp"
#include "kgrag/intersect.hpp"

using namespace kgrag;
namespace fs = std::filesystem;

namespace {
CanonicalTriple ct(const std::string& h, const std::string& r, const std::string& t) {
    return {h, r, t, {"p", 0, 0}};
}
KnowledgeGraph kg(const std::vector<CanonicalTriple>& ts) {
    return KnowledgeGraph::assemble(ts, RelationFilter::defaults());
}
}  // namespace

TEST_CASE("identical triples intersect with similarity exactly 1.0") {
    auto ga = kg({ct("insulin resistance", "causes", "hyperglycemia")});
    auto gb = kg({ct("insulin resistance", "causes", "hyperglycemia")});
    auto items = intersect_graphs(ga, gb, 0.65);
    REQUIRE(items.size() == 1);
    CHECK(items[0].similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(items[0].triple_a.same_fact(items[0].triple_b));
}

TEST_CASE("token-disjoint triples never intersect") {
    auto ga = kg({ct("obesity", "causes", "hyperglycemia")});
    auto gb = kg({ct("amyloid", "reduces", "cognition")});
    CHECK(intersect_graphs(ga, gb, 0.1).empty());
}

TEST_CASE("threshold above 1 keeps nothing, even exact matches") {
    auto ga = kg({ct("a1", "causes", "b1")});
    auto gb = kg({ct("a1", "causes", "b1")});
    CHECK(intersect_graphs(ga, gb, 1.01).empty());
}

TEST_CASE("non-positive threshold is rejected") {
    auto ga = kg({ct("a1", "causes", "b1")});
    CHECK_THROWS_AS(intersect_graphs(ga, ga, 0.0), ValidationError);
    CHECK_THROWS_AS(intersect_graphs(ga, ga, -0.5), ValidationError);
}

TEST_CASE("empty side yields an empty intersection") {
    auto ga = kg({ct("a1", "causes", "b1")});
    KnowledgeGraph empty;
    CHECK(intersect_graphs(ga, empty, 0.65).empty());
    CHECK(intersect_graphs(empty, ga, 0.65).empty());
}

TEST_CASE("cosine matches a hand-computed three-token vocabulary") {
    // joint corpus: "alpha causes beta." and "alpha causes gamma."
    // vocabulary {alpha, beta, causes, gamma}; df(alpha)=df(causes)=2, df(beta)=df(gamma)=1
    // idf shared = ln(3/3)+1 = 1; idf rare = ln(3/2)+1
    auto ga = kg({ct("alpha", "causes", "beta")});
    auto gb = kg({ct("alpha", "causes", "gamma")});
    double rare = std::log(1.5) + 1.0;
    double expect = 2.0 / (2.0 + rare * rare);  // dot of normalized rows
    auto items = intersect_graphs(ga, gb, 0.05);
    REQUIRE(items.size() == 1);
    CHECK(items[0].similarity == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("results sort by descending similarity and de-duplicate the a-side") {
    auto ga = kg({ct("insulin resistance", "causes", "hyperglycemia"),
                  ct("obesity", "promotes", "inflammation")});
    auto gb = kg({ct("insulin resistance", "causes", "hyperglycemia"),
                  ct("insulin resistance", "causes", "inflammation"),
                  ct("obesity", "promotes", "inflammation")});
    auto items = intersect_graphs(ga, gb, 0.3);
    REQUIRE(items.size() == 2);  // one surviving pair per distinct a-side triple
    CHECK(items[0].similarity >= items[1].similarity);
    CHECK(items[0].similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(items[0].triple_a.same_fact(items[0].triple_b));
}

TEST_CASE("intersection JSON round-trips") {
    auto ga = kg({ct("a1", "causes", "b1"), ct("c1", "reduces", "d1")});
    auto items = intersect_graphs(ga, ga, 0.65);
    REQUIRE(items.size() == 2);
    auto p = fs::temp_directory_path() / "kgrag_inter_rt.json";
    write_intersection(items, p.string());
    auto back = read_intersection(p.string());
    REQUIRE(back.size() == 2);
    CHECK(back[0].triple_a.same_fact(items[0].triple_a));
    CHECK(back[0].similarity == doctest::Approx(items[0].similarity).epsilon(1e-12));
}

TEST_CASE("embedding an empty verbalization is rejected") {
    TfidfTripleEncoder enc({"alpha causes beta."});
    CanonicalTriple t{"", "", "", {}};
    CHECK_THROWS_AS(embed_triple(t, enc), ValidationError);
}

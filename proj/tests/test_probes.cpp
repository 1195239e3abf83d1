#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "kgrag/probes.hpp"
#include "kgrag/rng.hpp"

using namespace kgrag;
namespace fs = std::filesystem;

namespace {

CanonicalTriple ct(const std::string& h, const std::string& r, const std::string& t) {
    return {h, r, t, {"p", 0, 0}};
}

KnowledgeGraph kg(const std::vector<CanonicalTriple>& ts) {
    return KnowledgeGraph::assemble(ts, RelationFilter::defaults());
}

std::vector<CanonicalTriple> random_triples(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<CanonicalTriple> out;
    std::vector<std::string> rels = {"causes", "reduces", "promotes"};
    while (static_cast<int>(out.size()) < m) {
        std::string h = "e" + std::to_string(rng.below(n));
        std::string t = "e" + std::to_string(rng.below(n));
        if (h == t) continue;
        std::string r = rels[rng.below(rels.size())];
        if (!seen.insert({h, r, t}).second) continue;
        out.push_back(ct(h, r, t));
    }
    return out;
}

std::string option_text(const ProbeItem& item, char letter) {
    for (const auto& [l, t] : item.options)
        if (l == letter) return t;
    return "";
}

}  // namespace

TEST_CASE("forced single-hop construction: one edge, three in-neighbors, key is the tail") {
    // unique causal edge (u, r, v); u has exactly 3 in-neighbors, none an
    // object of (u, r, .)
    auto g = kg({ct("u", "causes", "v"), ct("a", "reduces", "u"), ct("b", "reduces", "u"),
                 ct("c", "reduces", "u")});
    auto items = gen_single_hop(g, 10, 7);
    REQUIRE(items.size() == 1);
    const auto& it = items[0];
    CHECK(it.kind == ProbeKind::single_hop);
    CHECK(it.stem == "U causes:");
    CHECK(it.options.size() == 4);
    CHECK(option_text(it, it.key) == "v");
    std::set<std::string> opts;
    for (const auto& [l, t] : it.options) opts.insert(t);
    CHECK(opts == std::set<std::string>{"v", "a", "b", "c"});
}

TEST_CASE("single-hop keys match graph lookup on 200 items over a synthetic graph") {
    auto triples = random_triples(50, 400, 3);
    auto g = kg(triples);
    auto items = gen_single_hop(g, 200, 11);
    CHECK(!items.empty());
    for (const auto& it : items) {
        REQUIRE(it.source_triples.size() == 1);
        const auto& src = it.source_triples[0];
        CHECK(option_text(it, it.key) == src.tail);
        CHECK(g.has_fact(src.head, src.relation, src.tail));
        // distractors must not also be true objects of (u, r, .)
        for (const auto& [l, t] : it.options) {
            if (l == it.key) continue;
            CHECK_FALSE(g.has_fact(src.head, src.relation, t));
        }
    }
}

TEST_CASE("multi-hop keyed pair lies inside P1 and distractor pairs do not") {
    auto triples = random_triples(60, 500, 21);
    auto g = kg(triples);
    auto items = gen_multihop_pair(g, 50, 13);
    CHECK(!items.empty());
    for (const auto& it : items) {
        REQUIRE(it.atomic_options.size() == 4);
        REQUIRE(it.options.size() == 4);
        // recover the target from the stem "Which two are direct causes of X?"
        std::string prefix = "Which two are direct causes of ";
        REQUIRE(it.stem.substr(0, prefix.size()) == prefix);
        std::string x = it.stem.substr(prefix.size(), it.stem.size() - prefix.size() - 1);
        auto [p1, p2] = g.direct_and_two_hop_causes(x);
        auto pair_in_p1 = [&](const std::string& pair_text) {
            int i = pair_text[0] - '0';
            int j = pair_text[pair_text.size() - 1] - '0';
            return p1.count(it.atomic_options[i - 1]) > 0 &&
                   p1.count(it.atomic_options[j - 1]) > 0;
        };
        for (const auto& [letter, pair_text] : it.options) {
            if (letter == it.key) {
                CHECK(pair_in_p1(pair_text));
            } else {
                CHECK_FALSE(pair_in_p1(pair_text));
            }
        }
    }
}

TEST_CASE("fitb items key the masked entity and the stem carries the blank") {
    auto triples = random_triples(40, 300, 31);
    auto g = kg(triples);
    auto items = gen_fitb(g, 40, 17);
    CHECK(!items.empty());
    for (const auto& it : items) {
        CHECK(it.kind == ProbeKind::fitb);
        CHECK(it.stem.find("___") != std::string::npos);
        REQUIRE(it.source_triples.size() == 1);
        const auto& src = it.source_triples[0];
        std::string keyed = option_text(it, it.key);
        CHECK((keyed == src.head || keyed == src.tail));
        CHECK(g.has_fact(src.head, src.relation, src.tail));
    }
}

TEST_CASE("probe1 mixes kinds roughly 40/40/20 and has unique ids") {
    auto g = kg(random_triples(60, 500, 41));
    auto ps = gen_probe1(g, 50, 7);
    CHECK(ps.origin == "probe1");
    CHECK(ps.generation_seed == 7);
    CHECK(ps.graph_fingerprint == g.fingerprint());
    int sh = 0, mh = 0, fb = 0;
    std::set<std::string> ids;
    for (const auto& it : ps.items) {
        ids.insert(it.item_id);
        if (it.kind == ProbeKind::single_hop) ++sh;
        if (it.kind == ProbeKind::multi_hop_pair) ++mh;
        if (it.kind == ProbeKind::fitb) ++fb;
    }
    CHECK(ids.size() == ps.items.size());
    CHECK(sh == 20);
    CHECK(mh == 20);
    CHECK(fb == 10);
}

TEST_CASE("generation is deterministic in the seed") {
    auto g = kg(random_triples(50, 400, 51));
    auto a = gen_probe1(g, 30, 99);
    auto b = gen_probe1(g, 30, 99);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].item_id == b.items[i].item_id);
        CHECK(a.items[i].stem == b.items[i].stem);
        CHECK(a.items[i].key == b.items[i].key);
        CHECK(a.items[i].options == b.items[i].options);
    }
    auto c = gen_probe1(g, 30, 100);
    bool any_diff = false;
    for (std::size_t i = 0; i < std::min(a.items.size(), c.items.size()); ++i) {
        if (a.items[i].stem != c.items[i].stem || a.items[i].key != c.items[i].key)
            any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("no option pair collapses in canonical space under a 200-entry synonym map") {
    // entities come in surface pairs (eN, eN-alias) that canonicalize together
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 200; ++i) {
        pairs.emplace_back("e" + std::to_string(i) + "-alias", "e" + std::to_string(i));
    }
    auto syn = SynonymMap::from_pairs(pairs);
    Rng rng(77);
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<CanonicalTriple> triples;
    while (triples.size() < 800) {
        int hi = static_cast<int>(rng.below(120));
        int ti = static_cast<int>(rng.below(120));
        if (hi == ti) continue;
        std::string h = "e" + std::to_string(hi) + (rng.below(2) ? "-alias" : "");
        std::string t = "e" + std::to_string(ti) + (rng.below(2) ? "-alias" : "");
        // canonicalize as the pipeline would before assembly
        auto c = canonicalize(RawTriple{h, "causes", t, {}}, syn);
        if (!seen.insert({c.head, c.relation, c.tail}).second) continue;
        triples.push_back(c);
    }
    auto g = KnowledgeGraph::assemble(triples, RelationFilter::defaults());
    int total_items = 0;
    for (std::uint64_t seed = 0; total_items < 10000; ++seed) {
        auto ps = gen_probe1(g, 400, seed, syn);
        REQUIRE(!ps.items.empty());
        for (const auto& it : ps.items) {
            std::set<std::string> canon;
            for (const auto& [l, t] : it.options) {
                CHECK(canon.insert(syn.canonical(t)).second);
            }
        }
        total_items += static_cast<int>(ps.items.size());
    }
}

TEST_CASE("probe2 items restrict to intersection triples; reversed distractors are wrong") {
    auto core = random_triples(20, 120, 61);
    auto ga = kg(core);
    auto inter = intersect_graphs(ga, ga, 0.99);
    REQUIRE(!inter.empty());
    auto ps = gen_probe2(inter, 40, 7);
    CHECK(ps.origin == "probe2");
    CHECK(!ps.items.empty());
    std::set<std::tuple<std::string, std::string, std::string>> allowed;
    for (const auto& i : inter)
        allowed.insert({i.triple_a.head, i.triple_a.relation, i.triple_a.tail});
    bool saw_directed = false;
    for (const auto& it : ps.items) {
        if (it.kind != ProbeKind::multi_hop_pair) {
            for (const auto& src : it.source_triples) {
                CHECK(allowed.count({src.head, src.relation, src.tail}) == 1);
            }
        } else {
            CHECK(it.options.size() == 5);
            for (const auto& a : it.atomic_options) {
                if (a.find(" -> ") != std::string::npos) saw_directed = true;
            }
        }
    }
    CHECK(saw_directed);
    auto report = validate_probe_set(ps, nullptr, &inter);
    CHECK(report.valid());
}

TEST_CASE("validator flags exactly one key-mismatch when a key is corrupted") {
    auto g = kg(random_triples(50, 400, 71));
    auto ps = gen_probe1(g, 30, 7);
    REQUIRE(!ps.items.empty());
    auto clean = validate_probe_set(ps, &g, nullptr);
    REQUIRE(clean.valid());
    // corrupt one single-hop key to a different letter
    for (auto& it : ps.items) {
        if (it.kind == ProbeKind::single_hop) {
            it.key = (it.key == 'A') ? 'B' : 'A';
            break;
        }
    }
    auto report = validate_probe_set(ps, &g, nullptr);
    int key_mismatch = 0;
    for (const auto& f : report.findings) {
        if (f.code == "key-mismatch") ++key_mismatch;
    }
    CHECK(key_mismatch == 1);
}

TEST_CASE("validator flags duplicate ids and bad option counts") {
    auto g = kg(random_triples(50, 400, 81));
    auto ps = gen_probe1(g, 10, 7);
    REQUIRE(ps.items.size() >= 2);
    ps.items[1].item_id = ps.items[0].item_id;
    ps.items[0].options.pop_back();  // 3 options
    auto report = validate_probe_set(ps, &g, nullptr);
    bool dup = false, cnt = false;
    for (const auto& f : report.findings) {
        if (f.code == "duplicate-id") dup = true;
        if (f.code == "option-count") cnt = true;
    }
    CHECK(dup);
    CHECK(cnt);
}

TEST_CASE("probe sets round-trip through JSONL") {
    auto g = kg(random_triples(50, 400, 91));
    auto ps = gen_probe1(g, 20, 7);
    auto p = fs::temp_directory_path() / "kgrag_probes_rt.jsonl";
    write_probe_set(ps, p.string());
    auto back = read_probe_set(p.string());
    CHECK(back.origin == ps.origin);
    CHECK(back.generation_seed == ps.generation_seed);
    CHECK(back.graph_fingerprint == ps.graph_fingerprint);
    REQUIRE(back.items.size() == ps.items.size());
    for (std::size_t i = 0; i < ps.items.size(); ++i) {
        CHECK(back.items[i].item_id == ps.items[i].item_id);
        CHECK(back.items[i].stem == ps.items[i].stem);
        CHECK(back.items[i].key == ps.items[i].key);
        CHECK(back.items[i].options == ps.items[i].options);
        CHECK(back.items[i].allowed_letters == ps.items[i].allowed_letters);
        CHECK(to_string(back.items[i].kind) == to_string(ps.items[i].kind));
    }
}

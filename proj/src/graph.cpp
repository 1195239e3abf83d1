#include "kgrag/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/rng.hpp"

namespace kgrag {

using nlohmann::json;

namespace {

bool edge_key_less(const GraphEdge& a, const GraphEdge& b) {
    return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
}

}  // namespace

std::string verbalize(const GraphEdge& e) {
    return e.head + " " + e.relation + " " + e.tail + ".";
}

std::string verbalize(const CanonicalTriple& t) {
    return t.head + " " + t.relation + " " + t.tail + ".";
}

void KnowledgeGraph::rebuild_index() {
    std::set<std::string> ents;
    for (const auto& t : triples_) {
        ents.insert(t.head);
        ents.insert(t.tail);
    }
    entities_.assign(ents.begin(), ents.end());
    entity_index_.clear();
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        entity_index_[entities_[i]] = static_cast<int>(i);
    }

    const std::size_t n = entities_.size();
    const std::size_t words = (n + 63) / 64;
    adj_.assign(n, std::vector<std::uint64_t>(words, 0));
    RelationFilter rf{causal_relations_};
    for (const auto& t : triples_) {
        if (!rf.is_causal(t.relation)) continue;
        auto u = static_cast<std::size_t>(entity_index_.at(t.head));
        auto v = static_cast<std::size_t>(entity_index_.at(t.tail));
        adj_[u][v / 64] |= 1ULL << (v % 64);
    }
}

KnowledgeGraph KnowledgeGraph::assemble(const std::vector<CanonicalTriple>& triples,
                                        const RelationFilter& rf) {
    if (rf.causal_relations.empty()) throw ValidationError("assemble: empty relation filter");
    // Collapse duplicate canonical triples, accumulating provenances.
    std::map<std::tuple<std::string, std::string, std::string>, GraphEdge> dedup;
    for (const auto& t : triples) {
        auto key = std::make_tuple(t.head, t.relation, t.tail);
        auto it = dedup.find(key);
        if (it == dedup.end()) {
            dedup.emplace(key, GraphEdge{t.head, t.relation, t.tail, {t.provenance}});
        } else {
            it->second.provenances.push_back(t.provenance);
        }
    }
    KnowledgeGraph g;
    g.causal_relations_ = rf.causal_relations;
    for (auto& [key, edge] : dedup) {
        std::sort(edge.provenances.begin(), edge.provenances.end());
        edge.provenances.erase(std::unique(edge.provenances.begin(), edge.provenances.end()),
                               edge.provenances.end());
        g.triples_.push_back(std::move(edge));
    }
    g.rebuild_index();
    return g;
}

KnowledgeGraph KnowledgeGraph::merge(const std::vector<KnowledgeGraph>& graphs) {
    std::vector<CanonicalTriple> all;
    std::set<std::string> relations;
    for (const auto& g : graphs) {
        relations.insert(g.causal_relations_.begin(), g.causal_relations_.end());
        for (const auto& e : g.triples_) {
            for (const auto& p : e.provenances) {
                all.push_back(CanonicalTriple{e.head, e.relation, e.tail, p});
            }
        }
    }
    if (relations.empty()) throw ValidationError("merge: no graphs or empty relation sets");
    return assemble(all, RelationFilter{relations});
}

std::vector<GraphEdge> KnowledgeGraph::causal_triples() const {
    RelationFilter rf{causal_relations_};
    std::vector<GraphEdge> out;
    for (const auto& t : triples_) {
        if (rf.is_causal(t.relation)) out.push_back(t);
    }
    return out;
}

bool KnowledgeGraph::has_entity(const std::string& name) const {
    return entity_index_.count(name) > 0;
}

int KnowledgeGraph::entity_id(const std::string& name) const {
    auto it = entity_index_.find(name);
    if (it == entity_index_.end()) throw ValidationError("unknown entity: " + name);
    return it->second;
}

bool KnowledgeGraph::has_causal_edge(int u, int v) const {
    auto uu = static_cast<std::size_t>(u);
    auto vv = static_cast<std::size_t>(v);
    return (adj_[uu][vv / 64] >> (vv % 64)) & 1ULL;
}

bool KnowledgeGraph::has_causal_edge(const std::string& u, const std::string& v) const {
    if (!has_entity(u) || !has_entity(v)) return false;
    return has_causal_edge(entity_id(u), entity_id(v));
}

bool KnowledgeGraph::has_fact(const std::string& u, const std::string& r,
                              const std::string& v) const {
    GraphEdge probe{u, r, v, {}};
    auto it = std::lower_bound(triples_.begin(), triples_.end(), probe, edge_key_less);
    return it != triples_.end() && it->head == u && it->relation == r && it->tail == v;
}

int KnowledgeGraph::in_degree(int v) const {
    int deg = 0;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
        if (has_causal_edge(static_cast<int>(u), v)) ++deg;
    }
    return deg;
}

std::pair<std::set<std::string>, std::set<std::string>>
KnowledgeGraph::direct_and_two_hop_causes(const std::string& x) const {
    auto xi = static_cast<std::size_t>(entity_id(x));
    std::set<std::string> p1, p2;
    const std::size_t n = entities_.size();
    for (std::size_t u = 0; u < n; ++u) {
        if (u != xi && has_causal_edge(static_cast<int>(u), static_cast<int>(xi))) {
            p1.insert(entities_[u]);
        }
    }
    // (A^2)[u][x] = OR over w of A[u][w] & A[w][x]
    for (std::size_t u = 0; u < n; ++u) {
        if (u == xi) continue;
        bool hit = false;
        for (std::size_t w = 0; w < n && !hit; ++w) {
            hit = has_causal_edge(static_cast<int>(u), static_cast<int>(w)) &&
                  has_causal_edge(static_cast<int>(w), static_cast<int>(xi));
        }
        if (hit) p2.insert(entities_[u]);
    }
    return {p1, p2};
}

std::string KnowledgeGraph::to_json_string() const {
    json j;
    j["entities"] = entities_;
    j["causal_relations"] = causal_relations_;
    json triples = json::array();
    for (const auto& t : triples_) {
        json provs = json::array();
        for (const auto& p : t.provenances) {
            provs.push_back({{"paper_id", p.paper_id},
                             {"sentence_id", p.sentence_id},
                             {"clause_id", p.clause_id}});
        }
        triples.push_back({{"Entity 1", t.head},
                           {"Relationship", t.relation},
                           {"Entity 2", t.tail},
                           {"provenances", provs}});
    }
    j["triples"] = triples;
    return j.dump(2);
}

std::string KnowledgeGraph::fingerprint() const {
    std::ostringstream hex;
    hex << std::hex << fnv1a(to_json_string());
    return hex.str();
}

void KnowledgeGraph::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write graph: " + path);
    out << to_json_string() << "\n";
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("graph " + path + ": " + e.what());
    }
    std::vector<CanonicalTriple> triples;
    try {
        for (const auto& t : j.at("triples")) {
            CanonicalTriple c;
            c.head = t.at("Entity 1").get<std::string>();
            c.relation = t.at("Relationship").get<std::string>();
            c.tail = t.at("Entity 2").get<std::string>();
            if (t.contains("provenances") && !t.at("provenances").empty()) {
                for (const auto& p : t.at("provenances")) {
                    c.provenance = Provenance{p.value("paper_id", ""), p.value("sentence_id", 0),
                                              p.value("clause_id", 0)};
                    triples.push_back(c);
                }
            } else {
                triples.push_back(c);
            }
        }
        RelationFilter rf;
        for (const auto& r : j.at("causal_relations")) {
            rf.causal_relations.insert(r.get<std::string>());
        }
        return assemble(triples, rf);
    } catch (const json::exception& e) {
        throw ParseError("graph " + path + ": " + e.what());
    }
}

}  // namespace kgrag

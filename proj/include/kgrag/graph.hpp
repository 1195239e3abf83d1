#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgrag/triples.hpp"

namespace kgrag {

// One stored canonical fact; duplicate extractions collapse here and their
// provenances accumulate.
struct GraphEdge {
    std::string head;
    std::string relation;
    std::string tail;
    std::vector<Provenance> provenances;
};

// Canonical entity set, canonical triple set, and a boolean adjacency matrix
// restricted to the causal relation set. Immutable once assembled.
class KnowledgeGraph {
  public:
    KnowledgeGraph() = default;

    // Triples are expected to be masked and canonicalized already.
    static KnowledgeGraph assemble(const std::vector<CanonicalTriple>& triples,
                                   const RelationFilter& rf);
    static KnowledgeGraph merge(const std::vector<KnowledgeGraph>& graphs);

    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<GraphEdge>& triples() const { return triples_; }
    const std::set<std::string>& causal_relations() const { return causal_relations_; }

    std::vector<GraphEdge> causal_triples() const;

    bool has_entity(const std::string& name) const;
    int entity_id(const std::string& name) const;  // throws ValidationError if unknown
    bool has_causal_edge(int u, int v) const;
    bool has_causal_edge(const std::string& u, const std::string& v) const;
    // True causal edge (u, r, v) for a specific relation.
    bool has_fact(const std::string& u, const std::string& r, const std::string& v) const;

    // Number of causal in-edges of an entity (distinct source entities).
    int in_degree(int v) const;

    // P1 = direct causes {u : A[u][x]=1}, P2 = two-hop causes via the boolean
    // square of A. Self-loops are excluded from both.
    std::pair<std::set<std::string>, std::set<std::string>> direct_and_two_hop_causes(
        const std::string& x) const;

    std::string fingerprint() const;  // hex FNV-1a of the canonical serialization

    void save(const std::string& path) const;
    static KnowledgeGraph load(const std::string& path);
    std::string to_json_string() const;

  private:
    std::vector<std::string> entities_;  // sorted
    std::map<std::string, int> entity_index_;
    std::vector<GraphEdge> triples_;  // sorted by (head, relation, tail)
    std::set<std::string> causal_relations_;
    std::vector<std::vector<std::uint64_t>> adj_;  // bitset rows, adj_[u] bit v

    void rebuild_index();
};

// "head relation tail." — the form used for retrieval, embedding, and prompts.
std::string verbalize(const GraphEdge& e);
std::string verbalize(const CanonicalTriple& t);

}  // namespace kgrag
